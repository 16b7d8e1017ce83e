use std::fmt::Write;

use super::{Mindmap, MindmapNode};

/// Emit FreeMind XML for the supported subset.
///
/// A node whose kind is not implied by its icons/cloud/note/link gets the
/// kind's marker icon written first, so the kind survives a re-parse.
pub fn serialize_mindmap(map: &Mindmap) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "<map version=\"{}\">", escape_attr(&map.format_version));
    write_node(&mut out, &map.root, 0);
    out.push_str("</map>\n");
    out
}

fn write_node(out: &mut String, node: &MindmapNode, depth: usize) {
    let indent = "  ".repeat(depth);
    let _ = write!(
        out,
        "{indent}<node ID=\"{}\" TEXT=\"{}\"",
        escape_attr(&node.id),
        escape_attr(&node.text)
    );
    if let Some(link) = &node.link {
        let _ = write!(out, " LINK=\"{}\"", escape_attr(link));
    }
    if let Some(created) = &node.created {
        let _ = write!(out, " CREATED=\"{}\"", escape_attr(created));
    }
    if let Some(modified) = &node.modified {
        let _ = write!(out, " MODIFIED=\"{}\"", escape_attr(modified));
    }

    let marker = (node.inferred_kind() != node.kind).then(|| node.kind.marker_icon());
    let has_body = marker.is_some()
        || !node.icons.is_empty()
        || node.cloud
        || node.detail_note.is_some()
        || !node.children.is_empty();
    if !has_body {
        out.push_str("/>\n");
        return;
    }
    out.push_str(">\n");
    for icon in marker.into_iter().chain(node.icons.iter().map(String::as_str)) {
        let _ = writeln!(out, "{indent}  <icon BUILTIN=\"{}\"/>", escape_attr(icon));
    }
    if node.cloud {
        let _ = writeln!(out, "{indent}  <cloud/>");
    }
    if let Some(note) = &node.detail_note {
        let _ = write!(out, "{indent}  <richcontent TYPE=\"NOTE\"><html><head></head><body>");
        if !note.is_empty() {
            for line in note.split('\n') {
                let _ = write!(out, "<p>{}</p>", escape_text(line));
            }
        }
        out.push_str("</body></html></richcontent>\n");
    }
    for child in &node.children {
        write_node(out, child, depth + 1);
    }
    let _ = writeln!(out, "{indent}</node>");
}

fn is_xml_char(c: char) -> bool {
    matches!(c, '\t' | '\n' | '\r' | '\u{20}'..='\u{D7FF}' | '\u{E000}'..='\u{FFFD}' | '\u{10000}'..)
}

pub(crate) fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars().filter(|c| is_xml_char(*c)) {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars().filter(|c| is_xml_char(*c)) {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
    out
}
