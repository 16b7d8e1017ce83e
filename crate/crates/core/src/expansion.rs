//! Query expansion from the semantic neighbourhood of selected mindmap
//! elements.
//!
//! Every node in the neighbourhood becomes a small document. For term `t` in
//! document `d`:
//!
//! ```text
//! w(t, d) = freq(t, d) * docFreq(t) * docWeight(d) / docSize(d)
//! W(t)    = mean of w(t, d) over the docFreq(t) documents containing t
//! ```
//!
//! The `k` terms with the highest `W(t)` (ties broken alphabetically) that
//! are not already in the base query are appended to it.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::mindmap::{ElementKind, Mindmap};
use crate::text::{clean_token, tokenize, StopwordList};

pub const DEFAULT_K: usize = 4;
pub const DEFAULT_LEVEL: usize = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExpansionError {
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("neighbourhood level must be at least 1")]
    ZeroLevel,
    #[error("no elements selected")]
    EmptySelection,
    #[error("no documents to score")]
    EmptyCorpus,
    #[error("document {0:?} has no terms")]
    EmptyDocument(String),
    #[error("weight for {kind:?} must be positive and finite, got {value}")]
    InvalidWeight { kind: ElementKind, value: f64 },
}

impl crate::ErrorCode for ExpansionError {
    fn code(&self) -> &'static str {
        match self {
            ExpansionError::UnknownNode(_) => "UnknownNode",
            ExpansionError::ZeroLevel => "ZeroLevel",
            ExpansionError::EmptySelection => "EmptySelection",
            ExpansionError::EmptyCorpus => "EmptyCorpus",
            ExpansionError::EmptyDocument(_) => "EmptyDocument",
            ExpansionError::InvalidWeight { .. } => "InvalidWeight",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticNeighbourhood {
    pub selected_ids: BTreeSet<String>,
    pub level: usize,
    pub included_ids: BTreeSet<String>,
}

/// Nodes within undirected tree distance `level` of any selected node,
/// selected nodes included.
pub fn compute_neighbourhood<I, S>(
    map: &Mindmap,
    selected: I,
    level: usize,
) -> Result<SemanticNeighbourhood, ExpansionError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    if level == 0 {
        return Err(ExpansionError::ZeroLevel);
    }
    let selected_ids: BTreeSet<String> = selected.into_iter().map(|s| s.as_ref().to_string()).collect();
    if selected_ids.is_empty() {
        return Err(ExpansionError::EmptySelection);
    }

    let mut adjacency: HashMap<&str, Vec<&str>> = HashMap::new();
    for node in map.nodes() {
        adjacency.entry(node.id.as_str()).or_default();
        for child in &node.children {
            adjacency.entry(node.id.as_str()).or_default().push(&child.id);
            adjacency.entry(child.id.as_str()).or_default().push(&node.id);
        }
    }
    if let Some(missing) = selected_ids.iter().find(|id| !adjacency.contains_key(id.as_str())) {
        return Err(ExpansionError::UnknownNode(missing.clone()));
    }

    let mut distance: HashMap<&str, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for id in &selected_ids {
        distance.insert(id.as_str(), 0);
        queue.push_back(id.as_str());
    }
    while let Some(id) = queue.pop_front() {
        let d = distance[id];
        if d == level {
            continue;
        }
        for &next in &adjacency[id] {
            if !distance.contains_key(next) {
                distance.insert(next, d + 1);
                queue.push_back(next);
            }
        }
    }

    Ok(SemanticNeighbourhood {
        included_ids: distance.keys().map(|s| s.to_string()).collect(),
        selected_ids,
        level,
    })
}

/// Apply user marks: `(included ∪ add) \ remove`.
pub fn refine_neighbourhood<A, R, S>(
    map: &Mindmap,
    neighbourhood: &SemanticNeighbourhood,
    add: A,
    remove: R,
) -> Result<SemanticNeighbourhood, ExpansionError>
where
    A: IntoIterator<Item = S>,
    R: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let ids = map.ids();
    let check = |s: S| {
        let s = s.as_ref();
        if ids.contains(s) {
            Ok(s.to_string())
        } else {
            Err(ExpansionError::UnknownNode(s.to_string()))
        }
    };
    let add: Vec<String> = add.into_iter().map(check).collect::<Result<_, _>>()?;
    let remove: BTreeSet<String> = remove.into_iter().map(check).collect::<Result<_, _>>()?;

    let mut out = neighbourhood.clone();
    out.included_ids.extend(add);
    out.included_ids.retain(|id| !remove.contains(id));
    Ok(out)
}

/// Per-kind document weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocWeights(BTreeMap<ElementKind, f64>);

impl Default for DocWeights {
    fn default() -> Self {
        use ElementKind::*;
        let table = [
            (Topic, 2.0),
            (LargerTopic, 2.0),
            (KeywordsObject, 1.75),
            (Question, 1.5),
            (Hot, 1.5),
            (NeedsAction, 1.5),
            (WaitingTopic, 1.5),
            (Detail, 1.0),
            (Link, 1.0),
            (CodeObject, 1.0),
            (Cloud, 1.0),
        ];
        DocWeights(table.into_iter().collect())
    }
}

impl DocWeights {
    /// Defaults overridden by `overrides`; every weight must be positive.
    pub fn with_overrides(overrides: impl IntoIterator<Item = (ElementKind, f64)>) -> Result<Self, ExpansionError> {
        let mut weights = Self::default();
        for (kind, value) in overrides {
            if !(value.is_finite() && value > 0.0) {
                return Err(ExpansionError::InvalidWeight { kind, value });
            }
            weights.0.insert(kind, value);
        }
        Ok(weights)
    }

    pub fn get(&self, kind: ElementKind) -> f64 {
        self.0[&kind]
    }

    pub fn iter(&self) -> impl Iterator<Item = (ElementKind, f64)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }

    /// Every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        DocWeights(self.0.iter().map(|(k, v)| (*k, v * factor)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionDocument {
    pub doc_id: String,
    pub terms: Vec<String>,
    pub doc_weight: f64,
    pub doc_size: usize,
}

impl ExpansionDocument {
    pub fn new(doc_id: impl Into<String>, terms: Vec<String>, doc_weight: f64) -> Self {
        ExpansionDocument {
            doc_id: doc_id.into(),
            doc_size: terms.len(),
            terms,
            doc_weight,
        }
    }
}

/// One document per included node (preorder), from its text and note.
/// Nodes with no terms left after cleaning are dropped.
pub fn build_documents(
    map: &Mindmap,
    neighbourhood: &SemanticNeighbourhood,
    weights: &DocWeights,
    stopwords: &StopwordList,
) -> Vec<ExpansionDocument> {
    map.nodes()
        .filter(|n| neighbourhood.included_ids.contains(&n.id))
        .filter_map(|node| {
            let mut terms = tokenize(&node.text, stopwords);
            if let Some(note) = &node.detail_note {
                terms.extend(tokenize(note, stopwords));
            }
            (!terms.is_empty()).then(|| ExpansionDocument::new(&node.id, terms, weights.get(node.kind)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermScore {
    pub term: String,
    pub per_doc: BTreeMap<String, f64>,
    pub aggregate: f64,
    pub doc_freq: usize,
    pub freq_by_doc: BTreeMap<String, usize>,
}

pub fn score_terms(docs: &[ExpansionDocument]) -> Result<Vec<TermScore>, ExpansionError> {
    score_terms_with(docs, Execution::default())
}

pub fn score_terms_with(docs: &[ExpansionDocument], exec: Execution) -> Result<Vec<TermScore>, ExpansionError> {
    if docs.is_empty() {
        return Err(ExpansionError::EmptyCorpus);
    }
    if let Some(d) = docs.iter().find(|d| d.doc_size == 0 || d.terms.is_empty()) {
        return Err(ExpansionError::EmptyDocument(d.doc_id.clone()));
    }

    let counts: Vec<BTreeMap<&str, usize>> = exec.map(docs, |doc| {
        let mut freq = BTreeMap::new();
        for term in &doc.terms {
            *freq.entry(term.as_str()).or_insert(0) += 1;
        }
        freq
    });

    let mut by_term: BTreeMap<&str, BTreeMap<String, usize>> = BTreeMap::new();
    for (doc, freq) in docs.iter().zip(&counts) {
        for (term, n) in freq {
            *by_term.entry(term).or_default().entry(doc.doc_id.clone()).or_insert(0) += n;
        }
    }

    let weight_of: HashMap<&str, (f64, usize)> = docs
        .iter()
        .map(|d| (d.doc_id.as_str(), (d.doc_weight, d.doc_size)))
        .collect();

    let mut scores: Vec<TermScore> = by_term
        .into_iter()
        .map(|(term, freq_by_doc)| {
            let doc_freq = freq_by_doc.len();
            let per_doc: BTreeMap<String, f64> = freq_by_doc
                .iter()
                .map(|(doc_id, &freq)| {
                    let (weight, size) = weight_of[doc_id.as_str()];
                    let w = freq as f64 * doc_freq as f64 * weight / size as f64;
                    (doc_id.clone(), w)
                })
                .collect();
            let aggregate = per_doc.values().sum::<f64>() / doc_freq as f64;
            TermScore {
                term: term.to_string(),
                per_doc,
                aggregate,
                doc_freq,
                freq_by_doc,
            }
        })
        .collect();

    scores.sort_by(|a, b| b.aggregate.total_cmp(&a.aggregate).then_with(|| a.term.cmp(&b.term)));
    Ok(scores)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredTerm {
    pub term: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandedQuery {
    pub base_terms: Vec<String>,
    pub expansion_terms: Vec<ScoredTerm>,
    pub k: usize,
}

impl ExpandedQuery {
    pub fn unexpanded(base: &str) -> Self {
        ExpandedQuery {
            base_terms: base.split_whitespace().map(str::to_string).collect(),
            expansion_terms: Vec::new(),
            k: 0,
        }
    }

    /// Base terms then expansion terms, space-joined.
    pub fn query_string(&self) -> String {
        self.base_terms
            .iter()
            .map(String::as_str)
            .chain(self.expansion_terms.iter().map(|t| t.term.as_str()))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Pick the top `k` scored terms not already in `base`.
pub fn select_expansion(base: &str, scores: &[TermScore], k: usize) -> ExpandedQuery {
    let mut query = ExpandedQuery::unexpanded(base);
    query.k = k;
    let base_keys: BTreeSet<String> = query
        .base_terms
        .iter()
        .map(|t| clean_token(t))
        .filter(|t| !t.is_empty())
        .collect();
    query.expansion_terms = scores
        .iter()
        .filter(|s| !base_keys.contains(&s.term.to_lowercase()))
        .take(k)
        .map(|s| ScoredTerm {
            term: s.term.clone(),
            score: s.aggregate,
        })
        .collect();
    query
}

pub fn expand_query(
    base: &str,
    map: &Mindmap,
    neighbourhood: &SemanticNeighbourhood,
    weights: &DocWeights,
    stopwords: &StopwordList,
    k: usize,
) -> Result<ExpandedQuery, ExpansionError> {
    if k == 0 {
        return Ok(select_expansion(base, &[], 0));
    }
    let docs = build_documents(map, neighbourhood, weights, stopwords);
    if docs.is_empty() {
        return Ok(select_expansion(base, &[], k));
    }
    let scores = score_terms(&docs)?;
    Ok(select_expansion(base, &scores, k))
}
