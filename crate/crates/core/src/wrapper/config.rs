//! Parser for the XML wrapper configuration dialect.

use std::collections::BTreeSet;

use super::WrapperError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Processor {
    /// Fetches a page. `${name}` placeholders are substituted before the request.
    Http {
        url_template: String,
    },
    HtmlToXml {
        inner: Box<Processor>,
    },
    XPath {
        expression: String,
        inner: Box<Processor>,
    },
    VarRef {
        name: String,
    },
    ConstText {
        text: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDef {
    pub name: String,
    pub overwrite: bool,
    /// `None` binds empty text.
    pub pipeline: Option<Processor>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WrapperConfig {
    pub charset: String,
    pub var_defs: Vec<VarDef>,
}

impl WrapperConfig {
    pub fn var_names(&self) -> impl Iterator<Item = &str> {
        self.var_defs.iter().map(|v| v.name.as_str())
    }

    pub fn var_def(&self, name: &str) -> Option<&VarDef> {
        self.var_defs.iter().find(|v| v.name == name)
    }
}

const PROCESSORS: &[&str] = &["http", "html-to-xml", "xpath", "var", "text"];

fn malformed(msg: impl Into<String>) -> WrapperError {
    WrapperError::MalformedConfig(msg.into())
}

pub fn parse_config(xml_text: &str) -> Result<WrapperConfig, WrapperError> {
    let doc = roxmltree::Document::parse(xml_text).map_err(|e| malformed(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "config" {
        return Err(malformed(format!(
            "document element is `{}`, expected `config`",
            root.tag_name().name()
        )));
    }
    let charset = root.attribute("charset").unwrap_or("UTF-8").to_string();
    if encoding_rs::Encoding::for_label(charset.as_bytes()).is_none() {
        return Err(malformed(format!("unknown charset `{charset}`")));
    }

    let mut seen = BTreeSet::new();
    let mut var_defs = Vec::new();
    for child in root.children() {
        if child.is_text() {
            if child.text().is_some_and(|t| !t.trim().is_empty()) {
                return Err(malformed("text directly inside `config`"));
            }
            continue;
        }
        if !child.is_element() {
            continue;
        }
        let tag = child.tag_name().name();
        if tag != "var-def" {
            return Err(if PROCESSORS.contains(&tag) {
                malformed(format!("`{tag}` outside a var-def"))
            } else {
                WrapperError::UnknownProcessor(tag.to_string())
            });
        }
        let def = parse_var_def(child)?;
        if !seen.insert(def.name.clone()) {
            return Err(WrapperError::DuplicateVarDef(def.name));
        }
        var_defs.push(def);
    }
    if var_defs.is_empty() {
        return Err(malformed("config declares no var-def"));
    }
    Ok(WrapperConfig { charset, var_defs })
}

fn parse_var_def(node: roxmltree::Node) -> Result<VarDef, WrapperError> {
    let name = node.attribute("name").unwrap_or("").trim().to_string();
    if name.is_empty() {
        return Err(malformed("var-def without a name"));
    }
    let overwrite = match node.attribute("overwrite") {
        None | Some("true") => true,
        Some("false") => false,
        Some(other) => {
            return Err(malformed(format!(
                "var-def `{name}`: overwrite must be true or false, got `{other}`"
            )))
        }
    };
    let pipeline = single_child(node, &format!("var-def `{name}`"), true)?;
    Ok(VarDef {
        name,
        overwrite,
        pipeline,
    })
}

/// The lone processor inside `node`, if any.
fn single_child(node: roxmltree::Node, context: &str, optional: bool) -> Result<Option<Processor>, WrapperError> {
    let mut found = None;
    for child in node.children() {
        if child.is_text() {
            if child.text().is_some_and(|t| !t.trim().is_empty()) {
                return Err(malformed(format!("{context}: unexpected text")));
            }
        } else if child.is_element() {
            if found.is_some() {
                return Err(malformed(format!("{context}: more than one processor")));
            }
            found = Some(parse_processor(child)?);
        }
    }
    if found.is_none() && !optional {
        return Err(malformed(format!("{context}: missing inner processor")));
    }
    Ok(found)
}

fn required_attr<'a>(node: roxmltree::Node<'a, '_>, attr: &str) -> Result<&'a str, WrapperError> {
    node.attribute(attr)
        .filter(|v| !v.trim().is_empty())
        .ok_or_else(|| malformed(format!("`{}` needs a non-empty `{attr}`", node.tag_name().name())))
}

fn no_children(node: roxmltree::Node) -> Result<(), WrapperError> {
    if node.children().any(|c| c.is_element()) {
        return Err(malformed(format!(
            "`{}` takes no inner processor",
            node.tag_name().name()
        )));
    }
    Ok(())
}

fn parse_processor(node: roxmltree::Node) -> Result<Processor, WrapperError> {
    let tag = node.tag_name().name();
    match tag {
        "http" => {
            no_children(node)?;
            // long URLs are wrapped across lines in configs; URLs never contain whitespace
            let url_template: String = required_attr(node, "url")?
                .chars()
                .filter(|c| !c.is_whitespace())
                .collect();
            Ok(Processor::Http { url_template })
        }
        "html-to-xml" => {
            let inner = single_child(node, "html-to-xml", false)?.expect("required");
            Ok(Processor::HtmlToXml { inner: Box::new(inner) })
        }
        "xpath" => {
            let expression = required_attr(node, "expression")?.to_string();
            let inner = single_child(node, "xpath", false)?.expect("required");
            Ok(Processor::XPath {
                expression,
                inner: Box::new(inner),
            })
        }
        "var" => {
            no_children(node)?;
            Ok(Processor::VarRef {
                name: required_attr(node, "name")?.trim().to_string(),
            })
        }
        "text" => {
            no_children(node)?;
            Ok(Processor::ConstText {
                text: node.text().unwrap_or("").to_string(),
            })
        }
        "var-def" => Err(malformed("nested var-def")),
        other => Err(WrapperError::UnknownProcessor(other.to_string())),
    }
}
