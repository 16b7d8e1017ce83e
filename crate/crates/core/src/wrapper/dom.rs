//! Arena XML tree produced by the HTML repairer and queried by XPath.
//!
//! Nodes are appended in document order, so comparing [`NodeId`]s compares
//! document positions.

use std::fmt::Write;
use std::sync::Arc;

use crate::mindmap::write_escape::{escape_attr, escape_text};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeData {
    Document,
    Element { name: String, attrs: Vec<(String, String)> },
    Text(String),
}

#[derive(Debug, Clone)]
struct DomNode {
    parent: Option<NodeId>,
    data: NodeData,
    children: Vec<NodeId>,
}

#[derive(Debug, Clone)]
pub struct XmlDocument {
    nodes: Vec<DomNode>,
}

impl Default for XmlDocument {
    fn default() -> Self {
        Self::new()
    }
}

impl XmlDocument {
    pub fn new() -> Self {
        XmlDocument {
            nodes: vec![DomNode {
                parent: None,
                data: NodeData::Document,
                children: Vec::new(),
            }],
        }
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub(crate) fn append_element(&mut self, parent: NodeId, name: String, attrs: Vec<(String, String)>) -> NodeId {
        self.push(parent, NodeData::Element { name, attrs })
    }

    /// Appends text, merging with a preceding text sibling.
    pub(crate) fn append_text(&mut self, parent: NodeId, text: &str) {
        if text.is_empty() {
            return;
        }
        if let Some(&last) = self.nodes[parent.0].children.last() {
            // merging is only safe if `last` is the newest node overall
            if last.0 == self.nodes.len() - 1 {
                if let NodeData::Text(existing) = &mut self.nodes[last.0].data {
                    existing.push_str(text);
                    return;
                }
            }
        }
        self.push(parent, NodeData::Text(text.to_string()));
    }

    pub(crate) fn add_attr_if_absent(&mut self, id: NodeId, name: String, value: String) {
        if let NodeData::Element { attrs, .. } = &mut self.nodes[id.0].data {
            if !attrs.iter().any(|(n, _)| *n == name) {
                attrs.push((name, value));
            }
        }
    }

    fn push(&mut self, parent: NodeId, data: NodeData) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(DomNode {
            parent: Some(parent),
            data,
            children: Vec::new(),
        });
        self.nodes[parent.0].children.push(id);
        id
    }

    pub fn node(&self, id: NodeId) -> NodeRef<'_> {
        NodeRef { doc: self, id }
    }

    pub(crate) fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.0].children
    }

    pub(crate) fn data(&self, id: NodeId) -> &NodeData {
        &self.nodes[id.0].data
    }

    /// `id` and everything below it, in document order.
    pub(crate) fn subtree(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let mut stack = vec![id];
        std::iter::from_fn(move || {
            let next = stack.pop()?;
            stack.extend(self.nodes[next.0].children.iter().rev());
            Some(next)
        })
    }
}

/// Borrowed view of one node.
#[derive(Clone, Copy)]
pub struct NodeRef<'a> {
    doc: &'a XmlDocument,
    id: NodeId,
}

impl<'a> NodeRef<'a> {
    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn data(&self) -> &'a NodeData {
        self.doc.data(self.id)
    }

    pub fn is_element(&self) -> bool {
        matches!(self.data(), NodeData::Element { .. })
    }

    pub fn name(&self) -> Option<&'a str> {
        match self.data() {
            NodeData::Element { name, .. } => Some(name),
            _ => None,
        }
    }

    pub fn attr(&self, name: &str) -> Option<&'a str> {
        match self.data() {
            NodeData::Element { attrs, .. } => attrs.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_str()),
            _ => None,
        }
    }

    pub fn attrs(&self) -> &'a [(String, String)] {
        match self.data() {
            NodeData::Element { attrs, .. } => attrs,
            _ => &[],
        }
    }

    pub fn parent(&self) -> Option<NodeRef<'a>> {
        self.doc.nodes[self.id.0].parent.map(|id| NodeRef { doc: self.doc, id })
    }

    pub fn children(&self) -> impl Iterator<Item = NodeRef<'a>> + 'a {
        let doc = self.doc;
        doc.children(self.id).iter().map(move |&id| NodeRef { doc, id })
    }

    /// Concatenated text of all descendant text nodes.
    pub fn text(&self) -> String {
        self.doc
            .subtree(self.id)
            .filter_map(|id| match self.doc.data(id) {
                NodeData::Text(t) => Some(t.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Text with whitespace runs collapsed and ends trimmed.
    pub fn normalized_text(&self) -> String {
        self.text().split_whitespace().collect::<Vec<_>>().join(" ")
    }

    pub fn to_xml(&self) -> String {
        let mut out = String::new();
        write_node(self.doc, self.id, &mut out);
        out
    }
}

fn write_node(doc: &XmlDocument, id: NodeId, out: &mut String) {
    match doc.data(id) {
        NodeData::Document => {
            for &c in doc.children(id) {
                write_node(doc, c, out);
            }
        }
        NodeData::Text(t) => out.push_str(&escape_text(t)),
        NodeData::Element { name, attrs } => {
            out.push('<');
            out.push_str(name);
            for (n, v) in attrs {
                let _ = write!(out, " {n}=\"{}\"", escape_attr(v));
            }
            let children = doc.children(id);
            if children.is_empty() {
                out.push_str("/>");
            } else {
                out.push('>');
                for &c in children {
                    write_node(doc, c, out);
                }
                let _ = write!(out, "</{name}>");
            }
        }
    }
}

/// An ordered node list over a shared document.
#[derive(Debug, Clone)]
pub struct XmlNodes {
    doc: Arc<XmlDocument>,
    ids: Vec<NodeId>,
}

impl XmlNodes {
    /// The whole document as a one-node list.
    pub fn document(doc: XmlDocument) -> Self {
        let doc = Arc::new(doc);
        XmlNodes {
            ids: vec![doc.root()],
            doc,
        }
    }

    pub(crate) fn from_ids(doc: Arc<XmlDocument>, ids: Vec<NodeId>) -> Self {
        XmlNodes { doc, ids }
    }

    pub fn doc(&self) -> &Arc<XmlDocument> {
        &self.doc
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<NodeRef<'_>> {
        self.ids.get(i).map(|&id| self.doc.node(id))
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeRef<'_>> {
        self.ids.iter().map(|&id| self.doc.node(id))
    }

    /// Concatenated outer XML of every node.
    pub fn to_xml(&self) -> String {
        self.iter().map(|n| n.to_xml()).collect()
    }

    pub fn text(&self) -> String {
        self.iter().map(|n| n.text()).collect()
    }
}
