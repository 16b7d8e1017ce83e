//! FreeMind mindmap model.
//!
//! A [`Mindmap`] is a tree of [`MindmapNode`]s with unique ids. FreeMind does
//! not store element kinds, so [`ElementKind`] is inferred from icons, clouds,
//! notes and links on parse (see [`infer_kind`]) and re-encoded as a marker
//! icon on write when the stored markers would not imply it.

mod kind;
mod parse;
mod write;

pub(crate) mod write_escape {
    pub(crate) use super::write::{escape_attr, escape_text};
}

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use kind::{infer_kind, kind_for_icon, ElementKind};
pub use parse::{parse_mindmap, parse_mindmap_with_warnings, ParseWarning};
pub use write::serialize_mindmap;

pub const DEFAULT_FORMAT_VERSION: &str = "1.0.1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MindmapError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("document element is <{0}>, expected <map>")]
    NotAMindmap(String),
    #[error("duplicate node id {0:?}")]
    DuplicateId(String),
    #[error("empty node id")]
    EmptyId,
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("subtree id {0:?} already present in the map")]
    IdCollision(String),
}

impl crate::ErrorCode for MindmapError {
    fn code(&self) -> &'static str {
        match self {
            MindmapError::MalformedXml(_) => "MalformedXml",
            MindmapError::NotAMindmap(_) => "NotAMindmap",
            MindmapError::DuplicateId(_) => "DuplicateId",
            MindmapError::EmptyId => "EmptyId",
            MindmapError::UnknownNode(_) => "UnknownNode",
            MindmapError::IdCollision(_) => "IdCollision",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MindmapNode {
    pub id: String,
    pub text: String,
    pub kind: ElementKind,
    #[serde(default)]
    pub icons: Vec<String>,
    #[serde(default)]
    pub link: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail_note: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub cloud: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modified: Option<String>,
    #[serde(default)]
    pub children: Vec<MindmapNode>,
}

impl MindmapNode {
    pub fn new(id: impl Into<String>, text: impl Into<String>, kind: ElementKind) -> Self {
        MindmapNode {
            id: id.into(),
            text: text.into(),
            kind,
            icons: Vec::new(),
            link: None,
            detail_note: None,
            cloud: false,
            created: None,
            modified: None,
            children: Vec::new(),
        }
    }

    pub fn topic(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self::new(id, text, ElementKind::Topic)
    }

    pub fn with_link(mut self, link: impl Into<String>) -> Self {
        self.link = Some(link.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.detail_note = Some(note.into());
        self
    }

    pub fn with_icon(mut self, icon: impl Into<String>) -> Self {
        self.icons.push(icon.into());
        self
    }

    pub fn with_child(mut self, child: MindmapNode) -> Self {
        self.children.push(child);
        self
    }

    /// Kind implied by the stored markers alone.
    pub fn inferred_kind(&self) -> ElementKind {
        infer_kind(
            self.icons.iter().map(String::as_str),
            self.cloud,
            self.detail_note.is_some(),
            self.link.is_some(),
        )
    }

    /// Preorder traversal.
    pub fn iter(&self) -> impl Iterator<Item = &MindmapNode> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let node = stack.pop()?;
            stack.extend(node.children.iter().rev());
            Some(node)
        })
    }

    pub fn find(&self, id: &str) -> Option<&MindmapNode> {
        self.iter().find(|n| n.id == id)
    }

    pub fn find_mut(&mut self, id: &str) -> Option<&mut MindmapNode> {
        if self.id == id {
            return Some(self);
        }
        self.children.iter_mut().find_map(|c| c.find_mut(id))
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mindmap {
    pub root: MindmapNode,
    #[serde(skip)]
    pub source_path: Option<PathBuf>,
    #[serde(default = "default_version")]
    pub format_version: String,
}

fn default_version() -> String {
    DEFAULT_FORMAT_VERSION.to_string()
}

/// Structural equality; `source_path` is bookkeeping and does not count.
impl PartialEq for Mindmap {
    fn eq(&self, other: &Self) -> bool {
        self.format_version == other.format_version && self.root == other.root
    }
}

impl Mindmap {
    /// Build a map, checking that ids are non-empty and unique.
    pub fn new(root: MindmapNode) -> Result<Self, MindmapError> {
        let map = Mindmap {
            root,
            source_path: None,
            format_version: default_version(),
        };
        map.validate()?;
        Ok(map)
    }

    pub fn validate(&self) -> Result<(), MindmapError> {
        let mut seen = HashSet::new();
        for node in self.root.iter() {
            if node.id.is_empty() {
                return Err(MindmapError::EmptyId);
            }
            if !seen.insert(node.id.as_str()) {
                return Err(MindmapError::DuplicateId(node.id.clone()));
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> impl Iterator<Item = &MindmapNode> {
        self.root.iter()
    }

    pub fn node(&self, id: &str) -> Option<&MindmapNode> {
        self.root.find(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.node(id).is_some()
    }

    pub fn ids(&self) -> HashSet<&str> {
        self.nodes().map(|n| n.id.as_str()).collect()
    }

    /// child id -> parent id, for every non-root node.
    pub fn parents(&self) -> HashMap<&str, &str> {
        let mut out = HashMap::new();
        for node in self.nodes() {
            for child in &node.children {
                out.insert(child.id.as_str(), node.id.as_str());
            }
        }
        out
    }

    /// Append `subtree` as the last child of `parent_id`, in place.
    ///
    /// Checks run before anything is touched, so on error the map is unchanged.
    pub fn attach(&mut self, parent_id: &str, subtree: MindmapNode) -> Result<(), MindmapError> {
        if !self.contains(parent_id) {
            return Err(MindmapError::UnknownNode(parent_id.to_string()));
        }
        let existing = self.ids();
        let mut incoming = HashSet::new();
        for node in subtree.iter() {
            if node.id.is_empty() {
                return Err(MindmapError::EmptyId);
            }
            if existing.contains(node.id.as_str()) {
                return Err(MindmapError::IdCollision(node.id.clone()));
            }
            if !incoming.insert(node.id.as_str()) {
                return Err(MindmapError::DuplicateId(node.id.clone()));
            }
        }
        drop(incoming);
        drop(existing);
        self.root
            .find_mut(parent_id)
            .expect("parent checked above")
            .children
            .push(subtree);
        Ok(())
    }
}

/// Copy of `map` with `subtree` appended under `parent_id`.
pub fn attach_subtree(map: &Mindmap, parent_id: &str, subtree: MindmapNode) -> Result<Mindmap, MindmapError> {
    let mut out = map.clone();
    out.attach(parent_id, subtree)?;
    Ok(out)
}
