//! A closed subset of abbreviated XPath.
//!
//! Supported: `/name`, `//name`, `*`, relative first steps, and predicates
//! `[n]`, `[@a]`, `[@a='lit']` and `[contains(@a,'lit')]`. Everything else is
//! rejected with [`XPathError::Unsupported`].

use std::collections::BTreeSet;

use thiserror::Error;

use super::dom::{NodeData, NodeId, XmlDocument, XmlNodes};
use crate::error::ErrorCode;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XPathError {
    #[error("unsupported XPath construct `{construct}` in `{expression}`")]
    Unsupported { expression: String, construct: String },
    #[error("XPath syntax error in `{expression}`: {message}")]
    Syntax { expression: String, message: String },
}

impl ErrorCode for XPathError {
    fn code(&self) -> &'static str {
        match self {
            XPathError::Unsupported { .. } => "UnsupportedXPath",
            XPathError::Syntax { .. } => "SyntaxError",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    Child,
    Descendant,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Predicate {
    Position(usize),
    HasAttr(String),
    AttrEquals(String, String),
    AttrContains(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Step {
    axis: Axis,
    /// `None` matches any element.
    name: Option<String>,
    predicates: Vec<Predicate>,
}

/// A compiled expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XPath {
    source: String,
    absolute: bool,
    steps: Vec<Step>,
}

impl XPath {
    pub fn compile(expression: &str) -> Result<XPath, XPathError> {
        Parser {
            src: expression,
            pos: 0,
        }
        .parse()
    }

    pub fn as_str(&self) -> &str {
        &self.source
    }

    /// Evaluates against every node in `context`; the union is returned in
    /// document order.
    pub fn eval(&self, context: &XmlNodes) -> XmlNodes {
        let doc = context.doc();
        let mut current: Vec<NodeId> = context.ids().to_vec();
        for (i, step) in self.steps.iter().enumerate() {
            let mut next = BTreeSet::new();
            for &ctx in &current {
                let from_root = i == 0 && self.absolute;
                let groups = candidate_groups(doc, ctx, step.axis, from_root);
                for group in groups {
                    next.extend(apply_step(doc, step, group));
                }
            }
            current = next.into_iter().collect();
        }
        XmlNodes::from_ids(doc.clone(), current)
    }
}

/// Convenience wrapper: compile and evaluate.
pub fn xpath_eval(nodes: &XmlNodes, expression: &str) -> Result<XmlNodes, XPathError> {
    Ok(XPath::compile(expression)?.eval(nodes))
}

/// Sibling groups a step chooses from. Positional predicates apply per group.
fn candidate_groups(doc: &XmlDocument, ctx: NodeId, axis: Axis, from_root: bool) -> Vec<Vec<NodeId>> {
    let is_document = matches!(doc.data(ctx), NodeData::Document);
    // An absolute path over an element context treats that element as the
    // only child of a virtual document.
    let virtual_root = from_root && !is_document;
    match (axis, virtual_root) {
        (Axis::Child, true) => vec![vec![ctx]],
        (Axis::Child, false) => vec![doc.children(ctx).to_vec()],
        (Axis::Descendant, true) => {
            let mut groups = vec![vec![ctx]];
            groups.extend(doc.subtree(ctx).map(|n| doc.children(n).to_vec()));
            groups
        }
        (Axis::Descendant, false) => doc.subtree(ctx).map(|n| doc.children(n).to_vec()).collect(),
    }
}

fn apply_step(doc: &XmlDocument, step: &Step, group: Vec<NodeId>) -> Vec<NodeId> {
    let mut selected: Vec<NodeId> = group
        .into_iter()
        .filter(|&id| match doc.data(id) {
            NodeData::Element { name, .. } => step.name.as_ref().is_none_or(|n| n == name),
            _ => false,
        })
        .collect();
    for predicate in &step.predicates {
        selected = match predicate {
            Predicate::Position(n) => selected.get(n - 1).copied().into_iter().collect(),
            Predicate::HasAttr(a) => selected
                .into_iter()
                .filter(|&id| doc.node(id).attr(a).is_some())
                .collect(),
            Predicate::AttrEquals(a, v) => selected
                .into_iter()
                .filter(|&id| doc.node(id).attr(a) == Some(v.as_str()))
                .collect(),
            Predicate::AttrContains(a, v) => selected
                .into_iter()
                .filter(|&id| doc.node(id).attr(a).is_some_and(|x| x.contains(v.as_str())))
                .collect(),
        };
    }
    selected
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn syntax(&self, message: impl Into<String>) -> XPathError {
        XPathError::Syntax {
            expression: self.src.to_string(),
            message: message.into(),
        }
    }

    fn unsupported(&self, construct: impl Into<String>) -> XPathError {
        XPathError::Unsupported {
            expression: self.src.to_string(),
            construct: construct.into(),
        }
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn name(&mut self) -> Option<String> {
        let rest = self.rest();
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_alphabetic() || c == '_' => {}
            _ => return None,
        }
        let end = chars
            .find(|&(_, c)| !(c.is_alphanumeric() || matches!(c, '_' | '-' | '.')))
            .map_or(rest.len(), |(i, _)| i);
        self.pos += end;
        Some(rest[..end].to_string())
    }

    fn literal(&mut self) -> Result<String, XPathError> {
        let quote = match self.rest().chars().next() {
            Some(q @ ('\'' | '"')) => q,
            _ => return Err(self.syntax("expected string literal")),
        };
        self.pos += 1;
        let end = self
            .rest()
            .find(quote)
            .ok_or_else(|| self.syntax("unterminated string literal"))?;
        let value = self.rest()[..end].to_string();
        self.pos += end + 1;
        Ok(value)
    }

    fn parse(mut self) -> Result<XPath, XPathError> {
        self.skip_ws();
        if self.rest().is_empty() {
            return Err(self.syntax("empty expression"));
        }
        let absolute = self.rest().starts_with('/');
        let mut steps = Vec::new();
        loop {
            self.skip_ws();
            if self.rest().is_empty() {
                break;
            }
            let axis = if self.eat("//") {
                Axis::Descendant
            } else if self.eat("/") || (steps.is_empty() && !absolute) {
                Axis::Child
            } else if self.rest().starts_with('|') {
                return Err(self.unsupported("|"));
            } else {
                return Err(self.syntax(format!("unexpected `{}`", self.rest())));
            };
            steps.push(self.step(axis)?);
        }
        if steps.is_empty() {
            return Err(self.syntax("no location step"));
        }
        Ok(XPath {
            source: self.src.to_string(),
            absolute,
            steps,
        })
    }

    fn step(&mut self, axis: Axis) -> Result<Step, XPathError> {
        self.skip_ws();
        let rest = self.rest();
        if rest.starts_with("..") || rest.starts_with('.') {
            return Err(self.unsupported("."));
        }
        if rest.starts_with('@') {
            return Err(self.unsupported("attribute step"));
        }
        let name = if self.eat("*") {
            None
        } else {
            let name = self.name().ok_or_else(|| self.syntax("expected element name"))?;
            if self.rest().starts_with("::") {
                return Err(self.unsupported(format!("{name}::")));
            }
            if self.rest().trim_start().starts_with('(') {
                return Err(self.unsupported(format!("{name}()")));
            }
            Some(name)
        };
        let mut predicates = Vec::new();
        loop {
            self.skip_ws();
            if !self.eat("[") {
                break;
            }
            self.skip_ws();
            predicates.push(self.predicate()?);
            self.skip_ws();
            if !self.eat("]") {
                return Err(self.syntax("expected `]`"));
            }
        }
        Ok(Step { axis, name, predicates })
    }

    fn attr_name(&mut self) -> Result<String, XPathError> {
        if !self.eat("@") {
            return Err(self.unsupported("non-attribute operand"));
        }
        self.name().ok_or_else(|| self.syntax("expected attribute name"))
    }

    fn predicate(&mut self) -> Result<Predicate, XPathError> {
        let rest = self.rest();
        if rest.starts_with(|c: char| c.is_ascii_digit()) {
            let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
            let n: usize = rest[..end].parse().map_err(|_| self.syntax("position out of range"))?;
            self.pos += end;
            if n == 0 {
                return Err(self.syntax("positions start at 1"));
            }
            return Ok(Predicate::Position(n));
        }
        if rest.starts_with('@') {
            let attr = self.attr_name()?;
            self.skip_ws();
            if self.rest().starts_with(']') {
                return Ok(Predicate::HasAttr(attr));
            }
            if self.eat("=") {
                self.skip_ws();
                return Ok(Predicate::AttrEquals(attr, self.literal()?));
            }
            let op: String = self.rest().chars().take(2).collect();
            return Err(self.unsupported(op));
        }
        let Some(function) = self.name() else {
            return Err(self.syntax("expected predicate"));
        };
        self.skip_ws();
        if function != "contains" || !self.rest().starts_with('(') {
            return Err(self.unsupported(function));
        }
        self.eat("(");
        self.skip_ws();
        let attr = self.attr_name()?;
        self.skip_ws();
        if !self.eat(",") {
            return Err(self.syntax("expected `,`"));
        }
        self.skip_ws();
        let lit = self.literal()?;
        self.skip_ws();
        if !self.eat(")") {
            return Err(self.syntax("expected `)`"));
        }
        Ok(Predicate::AttrContains(attr, lit))
    }
}
