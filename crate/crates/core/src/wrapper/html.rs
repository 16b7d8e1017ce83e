//! Best-effort conversion of HTML tag soup into a well-formed tree.
//!
//! Every input produces a tree with a single `html` root. Comments, doctype
//! and processing instructions are dropped; `script` and `style` content is
//! kept as raw text.

use super::dom::{NodeId, XmlDocument, XmlNodes};

const VOID: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "keygen", "link", "meta", "param", "source", "track",
    "wbr",
];

const RAW_TEXT: &[&str] = &["script", "style"];

const CLOSES_P: &[&str] = &[
    "address",
    "article",
    "aside",
    "blockquote",
    "center",
    "div",
    "dl",
    "fieldset",
    "footer",
    "form",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "header",
    "hr",
    "menu",
    "nav",
    "ol",
    "p",
    "pre",
    "section",
    "table",
    "ul",
];

#[derive(Debug, PartialEq)]
enum Token {
    Start {
        name: String,
        attrs: Vec<(String, String)>,
        self_closing: bool,
    },
    End(String),
    Text(String),
}

/// Parses `html` and repairs it into a well-formed document.
pub fn html_to_xml(html: &str) -> XmlNodes {
    let mut doc = XmlDocument::new();
    let root = doc.append_element(doc.root(), "html".to_string(), Vec::new());
    let mut stack: Vec<(NodeId, String)> = vec![(root, "html".to_string())];

    for token in tokenize(html) {
        match token {
            Token::Text(text) => {
                let parent = stack.last().expect("root stays open").0;
                doc.append_text(parent, &text);
            }
            Token::Start {
                name,
                attrs,
                self_closing,
            } => {
                if name == "html" {
                    for (n, v) in attrs {
                        doc.add_attr_if_absent(root, n, v);
                    }
                    continue;
                }
                close_implied(&mut stack, &name);
                let parent = stack.last().expect("root stays open").0;
                let id = doc.append_element(parent, name.clone(), attrs);
                if !self_closing && !VOID.contains(&name.as_str()) {
                    stack.push((id, name));
                }
            }
            Token::End(name) => {
                if let Some(pos) = stack.iter().rposition(|(_, n)| *n == name) {
                    if pos > 0 {
                        stack.truncate(pos);
                    }
                }
            }
        }
    }
    XmlNodes::document(doc)
}

fn close_implied(stack: &mut Vec<(NodeId, String)>, incoming: &str) {
    if incoming == "a" {
        if let Some(pos) = stack.iter().rposition(|(_, n)| n == "a") {
            stack.truncate(pos.max(1));
        }
    }
    while stack.len() > 1 {
        let top = stack.last().expect("non-empty").1.as_str();
        if implicitly_closed(top, incoming) {
            stack.pop();
        } else {
            break;
        }
    }
}

fn implicitly_closed(open: &str, incoming: &str) -> bool {
    let any = |set: &[&str]| set.contains(&incoming);
    match open {
        "p" => any(CLOSES_P) || any(&["li", "dt", "dd", "tr", "td", "th"]),
        "li" => incoming == "li",
        "dt" | "dd" => any(&["dt", "dd"]),
        "td" | "th" => any(&["td", "th", "tr", "tbody", "thead", "tfoot"]),
        "tr" => any(&["tr", "tbody", "thead", "tfoot"]),
        "thead" | "tbody" | "tfoot" => any(&["tbody", "thead", "tfoot"]),
        "option" => any(&["option", "optgroup"]),
        _ => false,
    }
}

/// Lowercases and strips characters that are not valid in an unprefixed XML name.
fn sanitize_name(raw: &str) -> Option<String> {
    let name: String = raw
        .chars()
        .map(|c| c.to_ascii_lowercase())
        .filter(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        .collect();
    match name.chars().next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => Some(name),
        _ => None,
    }
}

fn tokenize(src: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < src.len() {
        let rest = &src[pos..];
        if !rest.starts_with('<') {
            let end = rest.find('<').unwrap_or(rest.len());
            tokens.push(Token::Text(decode_entities(&rest[..end])));
            pos += end;
            continue;
        }
        let after = &rest[1..];
        if after.starts_with("!--") {
            pos += skip_past(rest, "-->");
        } else if after.starts_with('!') || after.starts_with('?') {
            pos += skip_past(rest, ">");
        } else if let Some(tail) = after.strip_prefix('/') {
            if tail.starts_with(|c: char| c.is_ascii_alphabetic()) {
                let name_len = tail
                    .find(|c: char| c.is_whitespace() || c == '/' || c == '>')
                    .unwrap_or(tail.len());
                if let Some(name) = sanitize_name(&tail[..name_len]) {
                    tokens.push(Token::End(name));
                }
            }
            pos += skip_past(rest, ">");
        } else if after.starts_with(|c: char| c.is_ascii_alphabetic()) {
            let (token, used) = start_tag(rest);
            pos += used;
            if let Some(Token::Start {
                name,
                self_closing: false,
                ..
            }) = &token
            {
                if RAW_TEXT.contains(&name.as_str()) {
                    let name = name.clone();
                    tokens.extend(token);
                    let body = &src[pos..];
                    let close = format!("</{name}");
                    let end = body.to_ascii_lowercase().find(&close).unwrap_or(body.len());
                    if end > 0 {
                        tokens.push(Token::Text(strip_invalid(&body[..end])));
                    }
                    pos += end;
                    if pos < src.len() {
                        pos += skip_past(&src[pos..], ">");
                    }
                    tokens.push(Token::End(name));
                    continue;
                }
            }
            tokens.extend(token);
        } else {
            tokens.push(Token::Text("<".to_string()));
            pos += 1;
        }
    }
    tokens
}

/// Bytes up to and including `marker`, or the whole input.
fn skip_past(s: &str, marker: &str) -> usize {
    s.find(marker).map_or(s.len(), |i| i + marker.len())
}

/// Parses a start tag at the beginning of `s`; returns the token and bytes consumed.
fn start_tag(s: &str) -> (Option<Token>, usize) {
    let bytes = s.as_bytes();
    let mut i = 1;
    let name_end = s[i..]
        .find(|c: char| c.is_whitespace() || c == '/' || c == '>')
        .map_or(s.len(), |n| n + i);
    let name = sanitize_name(&s[i..name_end]);
    i = name_end;
    let mut attrs: Vec<(String, String)> = Vec::new();
    let mut self_closing = false;
    while i < s.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'>' {
            i += 1;
            break;
        } else if c == b'/' {
            i += 1;
            if bytes.get(i) == Some(&b'>') {
                self_closing = true;
                i += 1;
                break;
            }
        } else {
            let first_len = s[i..].chars().next().map_or(1, char::len_utf8);
            let attr_end = s[i..]
                .find(|c: char| c.is_whitespace() || c == '=' || c == '>' || c == '/')
                .map_or(s.len(), |n| n + i)
                .max(i + first_len);
            let raw_name = &s[i..attr_end];
            i = attr_end;
            while i < s.len() && bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            let mut value = String::new();
            if bytes.get(i) == Some(&b'=') {
                i += 1;
                while i < s.len() && bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                match bytes.get(i) {
                    Some(&q) if q == b'"' || q == b'\'' => {
                        let close = s[i + 1..].find(q as char).map_or(s.len(), |n| n + i + 1);
                        value = decode_entities(&s[i + 1..close]);
                        i = (close + 1).min(s.len());
                    }
                    _ => {
                        let end = s[i..]
                            .find(|c: char| c.is_whitespace() || c == '>')
                            .map_or(s.len(), |n| n + i);
                        value = decode_entities(&s[i..end]);
                        i = end;
                    }
                }
            }
            if let Some(n) = sanitize_name(raw_name) {
                if !n.starts_with("xmlns") && !attrs.iter().any(|(existing, _)| *existing == n) {
                    attrs.push((n, value));
                }
            }
        }
    }
    let token = name.map(|name| Token::Start {
        name,
        attrs,
        self_closing,
    });
    (token, i)
}

fn named_entity(name: &str) -> Option<char> {
    Some(match name {
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        "nbsp" => '\u{a0}',
        "copy" => '\u{a9}',
        "reg" => '\u{ae}',
        "trade" => '\u{2122}',
        "hellip" => '\u{2026}',
        "mdash" => '\u{2014}',
        "ndash" => '\u{2013}',
        "laquo" => '\u{ab}',
        "raquo" => '\u{bb}',
        "lsquo" => '\u{2018}',
        "rsquo" => '\u{2019}',
        "ldquo" => '\u{201c}',
        "rdquo" => '\u{201d}',
        "middot" => '\u{b7}',
        "bull" => '\u{2022}',
        _ => return None,
    })
}

fn is_xml_char(c: char) -> bool {
    matches!(c, '\t' | '\n' | '\r' | '\u{20}'..='\u{d7ff}' | '\u{e000}'..='\u{fffd}' | '\u{10000}'..)
}

fn strip_invalid(s: &str) -> String {
    s.chars().filter(|&c| is_xml_char(c)).collect()
}

/// Decodes character references; unknown or malformed ones stay literal.
pub(crate) fn decode_entities(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let decoded = rest[1..].find(';').filter(|&n| n > 0 && n <= 10).and_then(|n| {
            let body = &rest[1..=n];
            let c = if let Some(num) = body.strip_prefix('#') {
                let code = match num.strip_prefix(['x', 'X']) {
                    Some(hex) => u32::from_str_radix(hex, 16).ok(),
                    None => num.parse::<u32>().ok(),
                };
                code.and_then(char::from_u32)
            } else {
                named_entity(body)
            };
            c.map(|c| (c, n + 2))
        });
        match decoded {
            Some((c, used)) => {
                if is_xml_char(c) {
                    out.push(c);
                }
                rest = &rest[used..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    strip_invalid(&out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reparse(nodes: &XmlNodes) -> String {
        let xml = nodes.to_xml();
        roxmltree::Document::parse(&xml).unwrap_or_else(|e| panic!("{e}: {xml}"));
        xml
    }

    #[test]
    fn simple_bold() {
        let out = html_to_xml("<b>Ubuntu</b>");
        assert_eq!(reparse(&out), "<html><b>Ubuntu</b></html>");
    }

    #[test]
    fn unclosed_inline_closed_at_parent_end() {
        let out = html_to_xml("<p><b>x</p>");
        assert_eq!(reparse(&out), "<html><p><b>x</b></p></html>");
    }

    #[test]
    fn void_elements_and_unquoted_attributes() {
        let out = html_to_xml("<TD CLASS=f1 border=0>a<BR>b<img src=x.png></td>");
        assert_eq!(
            reparse(&out),
            "<html><td class=\"f1\" border=\"0\">a<br/>b<img src=\"x.png\"/></td></html>"
        );
    }

    #[test]
    fn html_element_merges_into_root() {
        let out = html_to_xml("<!DOCTYPE html><html lang=en><body>hi</body></html>trailing");
        assert_eq!(reparse(&out), "<html lang=\"en\"><body>hi</body>trailing</html>");
    }

    #[test]
    fn comments_and_processing_instructions_dropped() {
        let out = html_to_xml("a<!-- c <b> -->b<?php echo 1 ?>c");
        assert_eq!(reparse(&out), "<html>abc</html>");
    }

    #[test]
    fn script_content_is_raw() {
        let out = html_to_xml("<script>if (a < b && c) {}</SCRIPT><p>x");
        assert_eq!(
            reparse(&out),
            "<html><script>if (a &lt; b &amp;&amp; c) {}</script><p>x</p></html>"
        );
    }

    #[test]
    fn list_items_and_cells_close_implicitly() {
        let out = html_to_xml("<ul><li>a<li>b</ul><table><tr><td>1<td>2<tr><td>3</table>");
        assert_eq!(
            reparse(&out),
            "<html><ul><li>a</li><li>b</li></ul><table><tr><td>1</td><td>2</td></tr><tr><td>3</td></tr></table></html>"
        );
    }

    #[test]
    fn nested_anchor_closes_previous() {
        let out = html_to_xml("<a href=1>x<a href=2>y");
        assert_eq!(reparse(&out), "<html><a href=\"1\">x</a><a href=\"2\">y</a></html>");
    }

    #[test]
    fn stray_end_tags_ignored() {
        let out = html_to_xml("</div>a</b>b");
        assert_eq!(reparse(&out), "<html>ab</html>");
    }

    #[test]
    fn entities_decoded_and_reescaped() {
        let out = html_to_xml("a &amp; b &lt;c&gt; &#233;&#x41; &bogus; & x");
        let node = out.get(0).unwrap();
        assert_eq!(node.text(), "a & b <c> \u{e9}A &bogus; & x");
        reparse(&out);
    }

    #[test]
    fn names_sanitized_and_duplicate_attributes_dropped() {
        let out = html_to_xml("<fb:like a=1 A=2 x:y=3 xmlns=\"u\" 9z=4>t</fb:like>");
        assert_eq!(reparse(&out), "<html><fblike a=\"1\" xy=\"3\">t</fblike></html>");
    }

    #[test]
    fn bare_less_than_is_text() {
        let out = html_to_xml("1 < 2 <3");
        assert_eq!(out.get(0).unwrap().text(), "1 < 2 <3");
        reparse(&out);
    }

    #[test]
    fn block_closes_open_paragraph() {
        let out = html_to_xml("<p>one<div>two</div>");
        assert_eq!(reparse(&out), "<html><p>one</p><div>two</div></html>");
    }
}
