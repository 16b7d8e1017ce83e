//! Interpreter for parsed wrapper configurations.

use std::collections::BTreeMap;

use encoding_rs::{Encoding, UTF_8};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use super::config::{Processor, WrapperConfig};
use super::dom::XmlNodes;
use super::fetch::Fetcher;
use super::html::html_to_xml;
use super::xpath::XPath;
use super::WrapperError;

#[derive(Debug, Clone)]
pub enum Value {
    Text(String),
    Nodes(XmlNodes),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Text(_) => "text",
            Value::Nodes(_) => "nodes",
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(t) => Some(t),
            Value::Nodes(_) => None,
        }
    }

    pub fn as_nodes(&self) -> Option<&XmlNodes> {
        match self {
            Value::Nodes(n) => Some(n),
            Value::Text(_) => None,
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Text(t) => {
                let mut s = serializer.serialize_struct("Value", 2)?;
                s.serialize_field("type", "text")?;
                s.serialize_field("value", t)?;
                s.end()
            }
            Value::Nodes(nodes) => {
                let xml: Vec<String> = nodes.iter().map(|n| n.to_xml()).collect();
                let text: Vec<String> = nodes.iter().map(|n| n.normalized_text()).collect();
                let mut s = serializer.serialize_struct("Value", 3)?;
                s.serialize_field("type", "nodes")?;
                s.serialize_field("xml", &xml)?;
                s.serialize_field("text", &text)?;
                s.end()
            }
        }
    }
}

/// Variable bindings after a run, plus the URLs it requested.
#[derive(Debug, Clone, Default)]
pub struct ExecutionContext {
    pub bindings: BTreeMap<String, Value>,
    pub requested_urls: Vec<String>,
}

impl ExecutionContext {
    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.get(name)
    }
}

/// Runs every var-def in order. Parameters are bound before the first
/// var-def; a var-def with `overwrite="false"` keeps a parameter of the same
/// name instead of evaluating its pipeline.
pub fn execute(
    config: &WrapperConfig,
    params: &BTreeMap<String, String>,
    fetcher: &dyn Fetcher,
) -> Result<ExecutionContext, WrapperError> {
    let encoding = Encoding::for_label(config.charset.as_bytes()).unwrap_or(UTF_8);
    let mut ctx = ExecutionContext {
        bindings: params
            .iter()
            .map(|(k, v)| (k.clone(), Value::Text(v.clone())))
            .collect(),
        requested_urls: Vec::new(),
    };
    for def in &config.var_defs {
        if !def.overwrite && ctx.bindings.contains_key(&def.name) {
            continue;
        }
        let value = match &def.pipeline {
            None => Value::Text(String::new()),
            Some(p) => eval(p, &mut ctx, encoding, fetcher)?,
        };
        ctx.bindings.insert(def.name.clone(), value);
    }
    Ok(ctx)
}

fn eval(
    processor: &Processor,
    ctx: &mut ExecutionContext,
    encoding: &'static Encoding,
    fetcher: &dyn Fetcher,
) -> Result<Value, WrapperError> {
    match processor {
        Processor::ConstText { text } => Ok(Value::Text(text.clone())),
        Processor::VarRef { name } => ctx
            .bindings
            .get(name)
            .cloned()
            .ok_or_else(|| WrapperError::UnboundVariable(name.clone())),
        Processor::Http { url_template } => {
            let url = substitute(url_template, &ctx.bindings)?;
            ctx.requested_urls.push(url.clone());
            let bytes = fetcher.fetch(&url).map_err(|e| WrapperError::FetchFailed {
                url: e.url,
                reason: e.reason,
            })?;
            let (text, _, _) = encoding.decode(&bytes);
            Ok(Value::Text(text.into_owned()))
        }
        Processor::HtmlToXml { inner } => match eval(inner, ctx, encoding, fetcher)? {
            Value::Text(html) => Ok(Value::Nodes(html_to_xml(&html))),
            other => Err(mismatch("html-to-xml", "text", &other)),
        },
        Processor::XPath { expression, inner } => {
            let xpath = XPath::compile(expression)?;
            match eval(inner, ctx, encoding, fetcher)? {
                Value::Nodes(nodes) => Ok(Value::Nodes(xpath.eval(&nodes))),
                other => Err(mismatch("xpath", "nodes", &other)),
            }
        }
    }
}

fn mismatch(processor: &'static str, expected: &'static str, found: &Value) -> WrapperError {
    WrapperError::TypeMismatch {
        processor,
        expected,
        found: found.type_name(),
    }
}

/// Replaces each `${name}` with the form-encoded text bound to `name`.
/// A `${` without a closing brace is kept literally.
pub fn substitute(template: &str, bindings: &BTreeMap<String, Value>) -> Result<String, WrapperError> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(start) = rest.find("${") {
        let Some(len) = rest[start + 2..].find('}') else {
            break;
        };
        out.push_str(&rest[..start]);
        let name = &rest[start + 2..start + 2 + len];
        match bindings.get(name) {
            Some(Value::Text(v)) => out.extend(form_urlencoded::byte_serialize(v.as_bytes())),
            Some(other) => return Err(mismatch("http", "text", other)),
            None => return Err(WrapperError::UnboundVariable(name.to_string())),
        }
        rest = &rest[start + 3 + len..];
    }
    out.push_str(rest);
    Ok(out)
}
