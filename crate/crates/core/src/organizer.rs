//! Facet grouping of result lists and conversion of records into mindmap
//! subtrees.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use regex::Regex;
use serde::Serialize;
use thiserror::Error;

use crate::error::ErrorCode;
use crate::mindmap::{ElementKind, Mindmap, MindmapError, MindmapNode};
use crate::orchestrator::{MaterialKind, SupportMaterial};
use crate::record::PublicationRecord;
use crate::text::canonicalize;

/// Label for records without a value for the facet.
pub const OTHER_LABEL: &str = "other";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrganizerError {
    #[error("invalid regular expression `{pattern}`: {message}")]
    InvalidRegex { pattern: String, message: String },
    #[error("invalid facet `{0}`")]
    InvalidFacet(String),
    #[error(transparent)]
    Mindmap(#[from] MindmapError),
}

impl ErrorCode for OrganizerError {
    fn code(&self) -> &'static str {
        match self {
            OrganizerError::InvalidRegex { .. } => "InvalidRegex",
            OrganizerError::InvalidFacet(_) => "InvalidFacet",
            OrganizerError::Mindmap(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FacetField {
    Title,
    Date,
    Forum,
    Author,
    Venue,
    Abstract,
}

impl FacetField {
    const ALL: [FacetField; 6] = [
        FacetField::Title,
        FacetField::Date,
        FacetField::Forum,
        FacetField::Author,
        FacetField::Venue,
        FacetField::Abstract,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FacetField::Title => "title",
            FacetField::Date => "date",
            FacetField::Forum => "forum",
            FacetField::Author => "author",
            FacetField::Venue => "venue",
            FacetField::Abstract => "abstract",
        }
    }

    /// The text a regex facet runs over. Authors are joined with "; ".
    fn text(self, r: &PublicationRecord) -> Option<String> {
        match self {
            FacetField::Title => Some(r.title.clone()),
            FacetField::Date => r.date.map(|y| y.to_string()),
            FacetField::Forum => r.forum().map(str::to_string),
            FacetField::Author => (!r.authors.is_empty()).then(|| r.authors.join("; ")),
            FacetField::Venue => Some(r.venue_raw.clone()).filter(|v| !v.is_empty()),
            FacetField::Abstract => r.r#abstract.clone(),
        }
    }
}

impl FromStr for FacetField {
    type Err = OrganizerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        FacetField::ALL
            .into_iter()
            .find(|f| f.name() == s || (s == "authors" && *f == FacetField::Author))
            .ok_or_else(|| OrganizerError::InvalidFacet(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FacetSpec {
    Date,
    Forum,
    Author,
    Regex { field: FacetField, pattern: String },
}

impl FromStr for FacetSpec {
    type Err = OrganizerError;

    /// `date`, `forum`, `author`, or `regex:<field>:<pattern>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(rest) = s.strip_prefix("regex:") {
            let (field, pattern) = rest
                .split_once(':')
                .ok_or_else(|| OrganizerError::InvalidFacet(s.to_string()))?;
            return Ok(FacetSpec::Regex {
                field: field.parse()?,
                pattern: pattern.to_string(),
            });
        }
        match s.trim() {
            "date" => Ok(FacetSpec::Date),
            "forum" => Ok(FacetSpec::Forum),
            "author" | "authors" => Ok(FacetSpec::Author),
            _ => Err(OrganizerError::InvalidFacet(s.to_string())),
        }
    }
}

impl fmt::Display for FacetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FacetSpec::Date => f.write_str("date"),
            FacetSpec::Forum => f.write_str("forum"),
            FacetSpec::Author => f.write_str("author"),
            FacetSpec::Regex { field, pattern } => write!(f, "regex:{}:{pattern}", field.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultGroup {
    pub label: String,
    pub records: Vec<PublicationRecord>,
}

/// Groups records by facet value. Groups are sorted by label and records
/// keep their input order. Under the author facet a record joins the group
/// of every one of its authors.
pub fn group_results(records: &[PublicationRecord], facet: &FacetSpec) -> Result<Vec<ResultGroup>, OrganizerError> {
    let regex = match facet {
        FacetSpec::Regex { pattern, .. } => Some(Regex::new(pattern).map_err(|e| OrganizerError::InvalidRegex {
            pattern: pattern.clone(),
            message: e.to_string(),
        })?),
        _ => None,
    };
    let mut groups: BTreeMap<String, Vec<PublicationRecord>> = BTreeMap::new();
    for record in records {
        let labels: Vec<String> = match facet {
            FacetSpec::Date => record.date.map(|y| y.to_string()).into_iter().collect(),
            FacetSpec::Forum => record.forum().map(str::to_string).into_iter().collect(),
            FacetSpec::Author => {
                let mut seen = HashSet::new();
                record
                    .authors
                    .iter()
                    .map(|a| a.trim().to_string())
                    .filter(|a| !a.is_empty() && seen.insert(a.clone()))
                    .collect()
            }
            FacetSpec::Regex { field, .. } => {
                let re = regex.as_ref().expect("compiled above");
                field
                    .text(record)
                    .and_then(|text| {
                        re.captures(&text).map(|c| {
                            c.get(1)
                                .unwrap_or_else(|| c.get(0).expect("whole match"))
                                .as_str()
                                .to_string()
                        })
                    })
                    .into_iter()
                    .collect()
            }
        };
        if labels.is_empty() {
            groups.entry(OTHER_LABEL.to_string()).or_default().push(record.clone());
        }
        for label in labels {
            groups.entry(label).or_default().push(record.clone());
        }
    }
    Ok(groups
        .into_iter()
        .map(|(label, records)| ResultGroup { label, records })
        .collect())
}

/// Source of fresh node ids for imported subtrees.
#[derive(Debug, Clone)]
pub enum IdSource {
    /// `ID_` followed by a random UUID.
    Random,
    /// `<prefix><n>` counting up from `next`.
    Sequential { prefix: String, next: u64 },
}

impl IdSource {
    pub fn sequential(prefix: impl Into<String>) -> Self {
        IdSource::Sequential {
            prefix: prefix.into(),
            next: 1,
        }
    }

    pub fn next_id(&mut self) -> String {
        match self {
            IdSource::Random => format!("ID_{}", uuid::Uuid::new_v4().simple()),
            IdSource::Sequential { prefix, next } => {
                let id = format!("{prefix}{next}");
                *next += 1;
                id
            }
        }
    }
}

/// Builds the subtree for one record: a topic titled after the record with
/// a link child for its url, a detail child for its abstract, and one child
/// per supporting material.
pub fn build_mm_subtree(record: &PublicationRecord, materials: &[SupportMaterial], ids: &mut IdSource) -> MindmapNode {
    let mut root = MindmapNode::new(ids.next_id(), record.title.trim(), ElementKind::Topic);
    if let Some(url) = record.url.as_deref().filter(|u| !u.is_empty()) {
        root.children.push(link_node(ids, url, url));
    }
    if let Some(text) = record.r#abstract.as_deref().filter(|t| !t.trim().is_empty()) {
        root.children.push(abstract_node(ids, text));
    }
    for material in materials {
        match (material.kind, &material.url, &material.text) {
            (MaterialKind::Abstract, _, Some(text)) => root.children.push(abstract_node(ids, text)),
            (kind, Some(url), _) if kind != MaterialKind::Abstract => {
                root.children.push(link_node(ids, kind.name(), url))
            }
            _ => log::warn!("skipping {:?} material without content", material.kind),
        }
    }
    root
}

fn link_node(ids: &mut IdSource, text: &str, url: &str) -> MindmapNode {
    MindmapNode::new(ids.next_id(), text, ElementKind::Link).with_link(url)
}

fn abstract_node(ids: &mut IdSource, text: &str) -> MindmapNode {
    MindmapNode::new(ids.next_id(), "Abstract", ElementKind::Detail).with_note(text.trim())
}

/// Identity of an imported record subtree: its url child, or failing that
/// its canonical title.
fn import_key(node: &MindmapNode) -> String {
    node.children
        .iter()
        .find(|c| c.kind == ElementKind::Link && c.link.as_deref() == Some(c.text.as_str()))
        .map(|c| format!("url:{}", c.text))
        .unwrap_or_else(|| format!("title:{}", canonicalize(&node.text)))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ImportReport {
    pub imported: usize,
    pub skipped: usize,
}

/// Attaches `subtrees` under `target` in order, skipping any whose record is
/// already a child of `target`. The map is left untouched on error.
pub fn import_into(
    map: &mut Mindmap,
    target: &str,
    subtrees: Vec<MindmapNode>,
) -> Result<ImportReport, OrganizerError> {
    let mut next = map.clone();
    let mut report = ImportReport::default();
    let mut present: HashSet<String> = next
        .node(target)
        .ok_or_else(|| MindmapError::UnknownNode(target.to_string()))?
        .children
        .iter()
        .map(import_key)
        .collect();
    for subtree in subtrees {
        if present.insert(import_key(&subtree)) {
            next.attach(target, subtree)?;
            report.imported += 1;
        } else {
            report.skipped += 1;
        }
    }
    *map = next;
    Ok(report)
}

/// Copy of `map` with `subtrees` imported under `target`.
pub fn import_results(map: &Mindmap, target: &str, subtrees: Vec<MindmapNode>) -> Result<Mindmap, OrganizerError> {
    let mut out = map.clone();
    import_into(&mut out, target, subtrees)?;
    Ok(out)
}
