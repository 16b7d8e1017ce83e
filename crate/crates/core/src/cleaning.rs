//! Venue-name normalisation against an acronym/title catalog.
//!
//! A raw venue string `s` is assigned the catalog entry minimising
//! `lev(s, acronym) + lev(s, title)`, first entry winning ties.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::record::{PublicationRecord, VenueRef};

/// Longest string (in chars) the edit distance looks at.
pub const MAX_CHARS: usize = 512;

pub const SAMPLE_CATALOG: &str = include_str!("../data/venues-sample.tsv");

#[derive(Debug, thiserror::Error)]
pub enum CleaningError {
    #[error("venue catalog is empty")]
    EmptyCatalog,
    #[error("catalog line {line}: expected `acronym<TAB>title`")]
    MalformedLine { line: usize },
    #[error("catalog line {line}: empty acronym")]
    EmptyAcronym { line: usize },
    #[error("catalog line {line}: duplicate entry {acronym:?}")]
    DuplicateEntry { line: usize, acronym: String },
    #[error("reading catalog: {0}")]
    Io(#[from] std::io::Error),
}

impl crate::ErrorCode for CleaningError {
    fn code(&self) -> &'static str {
        match self {
            CleaningError::EmptyCatalog => "EmptyCatalog",
            CleaningError::MalformedLine { .. } => "MalformedCatalog",
            CleaningError::EmptyAcronym { .. } => "MalformedCatalog",
            CleaningError::DuplicateEntry { .. } => "MalformedCatalog",
            CleaningError::Io(_) => "Io",
        }
    }
}

/// Unit-cost edit distance over chars. Inputs longer than [`MAX_CHARS`] are
/// truncated.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a = capped_chars(a);
    let b = capped_chars(b);
    levenshtein_chars(&a, &b)
}

fn capped_chars(s: &str) -> Vec<char> {
    let chars: Vec<char> = s.chars().take(MAX_CHARS + 1).collect();
    if chars.len() > MAX_CHARS {
        log::warn!(
            "truncating {}-char string to {MAX_CHARS} for edit distance",
            s.chars().count()
        );
        chars[..MAX_CHARS].to_vec()
    } else {
        chars
    }
}

fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    // keep the shorter string in the row
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitute = prev[j] + usize::from(ca != cb);
            curr[j + 1] = substitute.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

#[derive(Debug, Clone)]
struct Entry {
    venue: VenueRef,
    acronym_chars: Vec<char>,
    title_chars: Vec<char>,
}

#[derive(Debug, Clone)]
pub struct VenueCatalog {
    entries: Vec<Entry>,
    max_distance: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VenueMatch {
    pub index: usize,
    pub acronym: String,
    pub title: String,
    pub distance: usize,
}

impl VenueCatalog {
    pub fn new(entries: impl IntoIterator<Item = (String, String)>) -> Result<Self, CleaningError> {
        let mut out: Vec<Entry> = Vec::new();
        for (i, (acronym, title)) in entries.into_iter().enumerate() {
            let line = i + 1;
            if acronym.trim().is_empty() {
                return Err(CleaningError::EmptyAcronym { line });
            }
            if out.iter().any(|e| e.venue.acronym == acronym && e.venue.title == title) {
                return Err(CleaningError::DuplicateEntry { line, acronym });
            }
            out.push(Entry {
                acronym_chars: capped_chars(&acronym),
                title_chars: capped_chars(&title),
                venue: VenueRef { acronym, title },
            });
        }
        if out.is_empty() {
            return Err(CleaningError::EmptyCatalog);
        }
        Ok(VenueCatalog {
            entries: out,
            max_distance: None,
        })
    }

    /// `acronym<TAB>title` per line; blank lines and `#` comments skipped.
    pub fn from_tsv(text: &str) -> Result<Self, CleaningError> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (acronym, title) = line
                .split_once('\t')
                .ok_or(CleaningError::MalformedLine { line: i + 1 })?;
            pairs.push((acronym.trim().to_string(), title.trim().to_string()));
        }
        Self::new(pairs)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CleaningError> {
        Self::from_tsv(&fs::read_to_string(path)?)
    }

    /// The bundled sample catalog.
    pub fn sample() -> Self {
        Self::from_tsv(SAMPLE_CATALOG).expect("bundled catalog is valid")
    }

    /// Leave records unnormalised when the best sum exceeds `max`.
    pub fn with_max_distance(mut self, max: Option<usize>) -> Self {
        self.max_distance = max;
        self
    }

    pub fn max_distance(&self) -> Option<usize> {
        self.max_distance
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &VenueRef> {
        self.entries.iter().map(|e| &e.venue)
    }

    pub fn to_tsv(&self) -> String {
        self.entries()
            .map(|v| format!("{}\t{}\n", v.acronym, v.title))
            .collect()
    }
}

pub fn match_venue(s: &str, catalog: &VenueCatalog) -> Result<VenueMatch, CleaningError> {
    match_venue_with(s, catalog, Execution::default())
}

pub fn match_venue_with(s: &str, catalog: &VenueCatalog, exec: Execution) -> Result<VenueMatch, CleaningError> {
    let chars = capped_chars(s);
    let (index, distance) = exec
        .argmin_by_key(&catalog.entries, |e| {
            levenshtein_chars(&chars, &e.acronym_chars) + levenshtein_chars(&chars, &e.title_chars)
        })
        .ok_or(CleaningError::EmptyCatalog)?;
    let venue = &catalog.entries[index].venue;
    Ok(VenueMatch {
        index,
        acronym: venue.acronym.clone(),
        title: venue.title.clone(),
        distance,
    })
}

pub fn normalize_records(
    records: Vec<PublicationRecord>,
    catalog: &VenueCatalog,
) -> Result<Vec<PublicationRecord>, CleaningError> {
    normalize_records_with(records, catalog, Execution::default())
}

/// Set `venue_norm` on every record from its `venue_raw`. Order is kept.
pub fn normalize_records_with(
    records: Vec<PublicationRecord>,
    catalog: &VenueCatalog,
    exec: Execution,
) -> Result<Vec<PublicationRecord>, CleaningError> {
    if catalog.is_empty() {
        return Err(CleaningError::EmptyCatalog);
    }
    // The outer loop is the parallel one; each scan stays sequential.
    let norms = exec.map(&records, |r| {
        if r.venue_raw.trim().is_empty() {
            return None;
        }
        let m = match_venue_with(&r.venue_raw, catalog, Execution::Sequential).ok()?;
        match catalog.max_distance {
            Some(max) if m.distance > max => None,
            _ => Some(VenueRef {
                acronym: m.acronym,
                title: m.title,
            }),
        }
    });
    Ok(records
        .into_iter()
        .zip(norms)
        .map(|(mut r, norm)| {
            r.venue_norm = norm;
            r
        })
        .collect())
}
