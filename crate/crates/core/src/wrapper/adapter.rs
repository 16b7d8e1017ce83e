//! Turns a wrapper run into rows of record fields.
//!
//! A [`ResultMapping`] names the variable holding each field, optionally with
//! an attribute (`results1@href`). Values are zipped by index, so the n-th
//! title pairs with the n-th url, venue and so on.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::WrapperConfig;
use super::engine::{execute, Value};
use super::fetch::Fetcher;
use super::WrapperError;
use crate::record::{extract_year, PublicationRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordField {
    Title,
    Url,
    Venue,
    Date,
    Authors,
    Abstract,
    Snippet,
}

impl RecordField {
    pub const ALL: [RecordField; 7] = [
        RecordField::Title,
        RecordField::Url,
        RecordField::Venue,
        RecordField::Date,
        RecordField::Authors,
        RecordField::Abstract,
        RecordField::Snippet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RecordField::Title => "title",
            RecordField::Url => "url",
            RecordField::Venue => "venue",
            RecordField::Date => "date",
            RecordField::Authors => "authors",
            RecordField::Abstract => "abstract",
            RecordField::Snippet => "snippet",
        }
    }
}

impl FromStr for RecordField {
    type Err = WrapperError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RecordField::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| WrapperError::InvalidMapping(format!("unknown record field `{s}`")))
    }
}

/// `var` or `var@attr`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSource {
    pub var: String,
    pub attr: Option<String>,
}

impl FromStr for FieldSource {
    type Err = WrapperError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (var, attr) = match s.split_once('@') {
            Some((v, a)) => (v.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        if var.is_empty() || attr.is_some_and(str::is_empty) {
            return Err(WrapperError::InvalidMapping(format!("bad field source `{s}`")));
        }
        Ok(FieldSource {
            var: var.to_string(),
            attr: attr.map(str::to_string),
        })
    }
}

impl fmt::Display for FieldSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.attr {
            Some(a) => write!(f, "{}@{a}", self.var),
            None => f.write_str(&self.var),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResultMapping {
    fields: BTreeMap<RecordField, FieldSource>,
}

impl ResultMapping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, field: RecordField, source: &str) -> Result<Self, WrapperError> {
        self.fields.insert(field, source.parse()?);
        Ok(self)
    }

    /// Builds a mapping from `field name → source` pairs as found in a config file.
    pub fn from_pairs<I, K, V>(pairs: I) -> Result<Self, WrapperError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut mapping = ResultMapping::new();
        for (k, v) in pairs {
            mapping = mapping.with(k.as_ref().parse()?, v.as_ref())?;
        }
        Ok(mapping)
    }

    pub fn get(&self, field: RecordField) -> Option<&FieldSource> {
        self.fields.get(&field)
    }

    pub fn iter(&self) -> impl Iterator<Item = (RecordField, &FieldSource)> {
        self.fields.iter().map(|(f, s)| (*f, s))
    }
}

/// One result row; fields absent from the page are absent from the map.
pub type ExtractedRow = BTreeMap<RecordField, String>;

/// A wrapped source: config plus mapping, queried through one parameter.
#[derive(Debug, Clone)]
pub struct WrapperSource {
    name: String,
    config: WrapperConfig,
    mapping: ResultMapping,
    query_var: String,
}

pub const DEFAULT_QUERY_VAR: &str = "searchQuery";

impl WrapperSource {
    /// Fails with `InvalidMapping` when the mapping has no title or refers to
    /// a variable the config never defines.
    pub fn new(name: impl Into<String>, config: WrapperConfig, mapping: ResultMapping) -> Result<Self, WrapperError> {
        if mapping.get(RecordField::Title).is_none() {
            return Err(WrapperError::InvalidMapping("mapping has no title field".into()));
        }
        for (field, source) in mapping.iter() {
            if config.var_def(&source.var).is_none() {
                return Err(WrapperError::InvalidMapping(format!(
                    "field `{}` reads `{}`, which the config does not define",
                    field.name(),
                    source.var
                )));
            }
        }
        Ok(WrapperSource {
            name: name.into(),
            config,
            mapping,
            query_var: DEFAULT_QUERY_VAR.to_string(),
        })
    }

    pub fn with_query_var(mut self, var: impl Into<String>) -> Self {
        self.query_var = var.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn config(&self) -> &WrapperConfig {
        &self.config
    }

    pub fn mapping(&self) -> &ResultMapping {
        &self.mapping
    }

    pub fn query_var(&self) -> &str {
        &self.query_var
    }

    /// Runs the wrapper with `query` bound to the query variable.
    pub fn extract(&self, query: &str, fetcher: &dyn Fetcher) -> Result<Vec<ExtractedRow>, WrapperError> {
        let params = BTreeMap::from([(self.query_var.clone(), query.to_string())]);
        let ctx = execute(&self.config, &params, fetcher)?;
        let columns: BTreeMap<RecordField, Vec<Option<String>>> = self
            .mapping
            .iter()
            .map(|(field, source)| {
                let values = ctx.get(&source.var).map_or_else(Vec::new, |v| column(v, source));
                (field, values)
            })
            .collect();
        let rows = columns[&RecordField::Title].len();
        Ok((0..rows)
            .map(|i| {
                columns
                    .iter()
                    .filter_map(|(field, values)| values.get(i).cloned().flatten().map(|v| (*field, v)))
                    .collect()
            })
            .collect())
    }

    /// Extracts rows and converts the first `limit` titled ones into records.
    /// `source_rank` is the row's position on the result page.
    pub fn search(
        &self,
        query: &str,
        limit: usize,
        fetcher: &dyn Fetcher,
    ) -> Result<Vec<PublicationRecord>, WrapperError> {
        Ok(self
            .extract(query, fetcher)?
            .iter()
            .enumerate()
            .filter_map(|(rank, row)| row_to_record(row, &self.name, rank))
            .take(limit)
            .collect())
    }
}

fn column(value: &Value, source: &FieldSource) -> Vec<Option<String>> {
    match value {
        Value::Text(t) if t.trim().is_empty() => Vec::new(),
        Value::Text(t) => vec![Some(t.trim().to_string())],
        Value::Nodes(nodes) => nodes
            .iter()
            .map(|n| match &source.attr {
                Some(a) => n.attr(a).map(|v| v.trim().to_string()),
                None => Some(n.normalized_text()),
            })
            .map(|v| v.filter(|s| !s.is_empty()))
            .collect(),
    }
}

/// `None` for rows without a title.
pub fn row_to_record(row: &ExtractedRow, source_id: &str, rank: usize) -> Option<PublicationRecord> {
    let title = row.get(&RecordField::Title)?;
    let mut record = PublicationRecord::new(title.clone(), source_id, rank);
    if let Some(url) = row.get(&RecordField::Url) {
        record = record.with_url(url.clone());
    }
    if let Some(venue) = row.get(&RecordField::Venue) {
        record = record.with_venue(venue.clone());
    }
    if let Some(year) = row.get(&RecordField::Date).and_then(|d| extract_year(d)) {
        record = record.with_date(year);
    }
    if let Some(authors) = row.get(&RecordField::Authors) {
        record = record.with_authors(split_authors(authors));
    }
    if let Some(text) = row.get(&RecordField::Abstract) {
        record = record.with_abstract(text.clone());
    }
    Some(record)
}

/// Splits an author line on `,`, `;` and ` and `, dropping a leading "by".
pub fn split_authors(line: &str) -> Vec<String> {
    let line = line.trim();
    let line = match line.get(..3) {
        Some(p) if p.eq_ignore_ascii_case("by ") => &line[3..],
        _ => line,
    };
    line.split([',', ';'])
        .flat_map(|part| part.split(" and "))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}
