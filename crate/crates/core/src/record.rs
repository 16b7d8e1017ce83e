use serde::{Deserialize, Serialize};

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

/// A catalog entry a raw venue string was normalised to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VenueRef {
    pub acronym: String,
    pub title: String,
}

/// One search hit as extracted from a wrapped source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub title: String,
    #[serde(default)]
    pub authors: Vec<String>,
    #[serde(default)]
    pub venue_raw: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub venue_norm: Option<VenueRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r#abstract: Option<String>,
    #[serde(default)]
    pub source_id: String,
    #[serde(default)]
    pub source_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecordError {
    #[error("record title is empty")]
    EmptyTitle,
    #[error("year {0} outside [{MIN_YEAR}, {MAX_YEAR}]")]
    YearOutOfRange(i32),
}

impl crate::ErrorCode for RecordError {
    fn code(&self) -> &'static str {
        match self {
            RecordError::EmptyTitle => "EmptyTitle",
            RecordError::YearOutOfRange(_) => "YearOutOfRange",
        }
    }
}

impl PublicationRecord {
    pub fn new(title: impl Into<String>, source_id: impl Into<String>, source_rank: usize) -> Self {
        PublicationRecord {
            title: title.into(),
            authors: Vec::new(),
            venue_raw: String::new(),
            venue_norm: None,
            date: None,
            url: None,
            r#abstract: None,
            source_id: source_id.into(),
            source_rank,
        }
    }

    pub fn with_venue(mut self, venue: impl Into<String>) -> Self {
        self.venue_raw = venue.into();
        self
    }

    pub fn with_date(mut self, year: i32) -> Self {
        self.date = Some(year);
        self
    }

    pub fn with_url(mut self, url: impl Into<String>) -> Self {
        self.url = Some(url.into());
        self
    }

    pub fn with_authors<I, S>(mut self, authors: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.authors = authors.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_abstract(mut self, text: impl Into<String>) -> Self {
        self.r#abstract = Some(text.into());
        self
    }

    pub fn validate(&self) -> Result<(), RecordError> {
        if self.title.trim().is_empty() {
            return Err(RecordError::EmptyTitle);
        }
        match self.date {
            Some(y) if !(MIN_YEAR..=MAX_YEAR).contains(&y) => Err(RecordError::YearOutOfRange(y)),
            _ => Ok(()),
        }
    }

    /// Forum label: the normalised acronym when known, else the raw venue.
    pub fn forum(&self) -> Option<&str> {
        match &self.venue_norm {
            Some(v) => Some(v.acronym.as_str()),
            None => {
                let raw = self.venue_raw.trim();
                (!raw.is_empty()).then_some(raw)
            }
        }
    }
}

/// Pull the first plausible publication year out of free text.
pub fn extract_year(text: &str) -> Option<i32> {
    let bytes = text.as_bytes();
    let mut i = 0;
    while i + 4 <= bytes.len() {
        let window = &bytes[i..i + 4];
        let bounded_left = i == 0 || !bytes[i - 1].is_ascii_digit();
        let bounded_right = i + 4 == bytes.len() || !bytes[i + 4].is_ascii_digit();
        if bounded_left && bounded_right && window.iter().all(u8::is_ascii_digit) {
            let year: i32 = std::str::from_utf8(window).ok()?.parse().ok()?;
            if (MIN_YEAR..=MAX_YEAR).contains(&year) {
                return Some(year);
            }
        }
        i += 1;
    }
    None
}
