//! Tokenisation, stopwords and title canonicalisation shared by the
//! expansion, dedup and verification code.

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::Path;

/// The bundled English stopword list (one term per line, `#` comments).
pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords-en-v1.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl StopwordList {
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        StopwordList { words }
    }

    pub fn load(path: impl AsRef<Path>) -> io::Result<Self> {
        Ok(Self::parse(&fs::read_to_string(path)?))
    }

    pub fn empty() -> Self {
        StopwordList { words: HashSet::new() }
    }

    pub fn contains(&self, term: &str) -> bool {
        self.words.contains(term)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Default for StopwordList {
    fn default() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }
}

/// Lowercase a whitespace-delimited token and drop every character that is
/// neither alphanumeric nor a hyphen. Leading and trailing hyphens go too, so
/// `"rank-based,"` becomes `"rank-based"` and `"--"` becomes empty.
pub fn clean_token(raw: &str) -> String {
    let kept: String = raw
        .chars()
        .filter(|c| c.is_alphanumeric() || *c == '-')
        .flat_map(char::to_lowercase)
        .collect();
    kept.trim_matches('-').to_string()
}

/// Split on whitespace, clean each token, and drop empties and stopwords.
pub fn tokenize(text: &str, stopwords: &StopwordList) -> Vec<String> {
    text.split_whitespace()
        .map(clean_token)
        .filter(|t| !t.is_empty() && !stopwords.contains(t))
        .collect()
}

/// Casefold, replace punctuation with spaces and collapse whitespace.
///
/// Used for exact-match dedup keys and for "title appears in document"
/// verification, so both sides of a comparison must go through it.
pub fn canonicalize(text: &str) -> String {
    let mapped: String = text
        .chars()
        .flat_map(|c| {
            let c = if c.is_alphanumeric() { c } else { ' ' };
            c.to_lowercase()
        })
        .collect();
    mapped.split_whitespace().collect::<Vec<_>>().join(" ")
}
