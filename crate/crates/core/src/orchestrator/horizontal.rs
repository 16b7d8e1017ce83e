//! Horizontal search: documents, abstracts, slides and blog posts for a
//! single publication record.

use std::path::PathBuf;
use std::sync::{Arc, LazyLock};

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::OrchestratorError;
use crate::record::PublicationRecord;
use crate::text::{canonicalize, clean_token};
use crate::wrapper::{fixture_key, Fetcher, RecordField, WrapperError, WrapperSource};

pub const DEFAULT_MIN_SECTIONS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileType {
    Pdf,
    Doc,
    Ppt,
}

impl FileType {
    pub fn as_str(self) -> &'static str {
        match self {
            FileType::Pdf => "pdf",
            FileType::Doc => "doc",
            FileType::Ppt => "ppt",
        }
    }
}

/// A structured engine query. Each engine renders it in its own syntax.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EngineQuery {
    /// Searched as an exact phrase.
    pub phrase: Option<String>,
    pub terms: Vec<String>,
    pub filetype: Option<FileType>,
}

impl EngineQuery {
    /// Web-search style: `"phrase" terms filetype:pdf`.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        if let Some(p) = &self.phrase {
            parts.push(format!("\"{}\"", p.replace('"', "")));
        }
        parts.extend(self.terms.iter().cloned());
        if let Some(ft) = self.filetype {
            parts.push(format!("filetype:{}", ft.as_str()));
        }
        parts.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EngineHit {
    pub title: String,
    pub url: String,
    pub snippet: Option<String>,
}

pub trait SearchEngine: Send + Sync {
    fn name(&self) -> &str;
    fn search(&self, query: &EngineQuery) -> Result<Vec<EngineHit>, WrapperError>;
}

/// An engine backed by a scraping wrapper. The rendered query is bound to
/// the wrapper's query variable; hits need a title and a url.
pub struct WrapperEngine {
    source: WrapperSource,
    fetcher: Arc<dyn Fetcher>,
}

impl WrapperEngine {
    pub fn new(source: WrapperSource, fetcher: Arc<dyn Fetcher>) -> Result<Self, WrapperError> {
        if source.mapping().get(RecordField::Url).is_none() {
            return Err(WrapperError::InvalidMapping(format!(
                "engine `{}` needs a url field",
                source.name()
            )));
        }
        Ok(WrapperEngine { source, fetcher })
    }
}

impl SearchEngine for WrapperEngine {
    fn name(&self) -> &str {
        self.source.name()
    }

    fn search(&self, query: &EngineQuery) -> Result<Vec<EngineHit>, WrapperError> {
        let rows = self.source.extract(&query.render(), &*self.fetcher)?;
        Ok(rows
            .into_iter()
            .filter_map(|mut row| {
                Some(EngineHit {
                    title: row.remove(&RecordField::Title)?,
                    url: row.remove(&RecordField::Url)?,
                    snippet: row.remove(&RecordField::Snippet),
                })
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedText {
    pub text: String,
    /// `false` when extraction failed; `text` is then empty.
    pub ok: bool,
}

/// Plain-text extraction for fetched documents. Never fails; a failure is
/// an empty, flagged result.
pub trait TextExtractor: Send + Sync {
    fn extract(&self, url: &str) -> ExtractedText;
}

/// Reads `<dir>/<fixture_key(url)>.txt` prepared next to fixture pages.
#[derive(Debug, Clone)]
pub struct SidecarExtractor {
    dir: PathBuf,
}

impl SidecarExtractor {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        SidecarExtractor { dir: dir.into() }
    }

    pub fn path_for(&self, url: &str) -> PathBuf {
        self.dir.join(format!("{}.txt", fixture_key(url)))
    }
}

impl TextExtractor for SidecarExtractor {
    fn extract(&self, url: &str) -> ExtractedText {
        match std::fs::read_to_string(self.path_for(url)) {
            Ok(text) => ExtractedText { text, ok: true },
            Err(e) => {
                log::debug!("no sidecar text for {url}: {e}");
                ExtractedText {
                    text: String::new(),
                    ok: false,
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MaterialKind {
    Document,
    Abstract,
    Slides,
    BlogPost,
}

impl MaterialKind {
    pub fn name(self) -> &'static str {
        match self {
            MaterialKind::Document => "Document",
            MaterialKind::Abstract => "Abstract",
            MaterialKind::Slides => "Slides",
            MaterialKind::BlogPost => "BlogPost",
        }
    }
}

/// Supporting material found for a record. `evidence` says which check
/// produced the `verified` flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportMaterial {
    pub kind: MaterialKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    pub verified: bool,
    pub evidence: String,
}

impl SupportMaterial {
    fn from_hit(kind: MaterialKind, hit: &EngineHit, verified: bool, evidence: String) -> Self {
        SupportMaterial {
            kind,
            url: Some(hit.url.clone()),
            title: Some(hit.title.clone()),
            text: None,
            verified,
            evidence,
        }
    }
}

fn engine_search(engine: &dyn SearchEngine, query: &EngineQuery) -> Result<Vec<EngineHit>, OrchestratorError> {
    engine.search(query).map_err(|source| OrchestratorError::EngineFailed {
        engine: engine.name().to_string(),
        source,
    })
}

fn title_phrase(record: &PublicationRecord) -> Result<String, OrchestratorError> {
    let title = record.title.trim();
    if canonicalize(title).is_empty() {
        return Err(OrchestratorError::MissingTitle);
    }
    Ok(title.to_string())
}

/// Searches for the full text as pdf, then doc. The first candidate whose
/// extracted text contains the canonical title wins; otherwise the top
/// candidate comes back unverified.
pub fn find_document(
    record: &PublicationRecord,
    engine: &dyn SearchEngine,
    extractor: &dyn TextExtractor,
) -> Result<SupportMaterial, OrchestratorError> {
    let phrase = title_phrase(record)?;
    let wanted = canonicalize(&phrase);
    let mut top: Option<EngineHit> = None;
    let mut checked = 0;
    for filetype in [FileType::Pdf, FileType::Doc] {
        let query = EngineQuery {
            phrase: Some(phrase.clone()),
            terms: Vec::new(),
            filetype: Some(filetype),
        };
        for hit in engine_search(engine, &query)? {
            checked += 1;
            let text = extractor.extract(&hit.url);
            if text.ok && canonicalize(&text.text).contains(&wanted) {
                return Ok(SupportMaterial::from_hit(
                    MaterialKind::Document,
                    &hit,
                    true,
                    "title-substring".into(),
                ));
            }
            top.get_or_insert(hit);
        }
    }
    let hit = top.ok_or(OrchestratorError::NoCandidates)?;
    Ok(SupportMaterial::from_hit(
        MaterialKind::Document,
        &hit,
        false,
        format!("title-substring:absent in {checked} candidates"),
    ))
}

static NUMBERED_HEADING: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(?:\d+(?:\.\d+)*\.?|[IVX]+\.)\s+([A-Z][^.!?]{0,60})$").expect("valid regex"));

const NAMED_HEADINGS: &[&str] = &[
    "abstract",
    "introduction",
    "keywords",
    "index terms",
    "general terms",
    "categories and subject descriptors",
    "background",
    "related work",
    "conclusion",
    "conclusions",
    "references",
    "acknowledgments",
    "acknowledgements",
];

fn heading_key(line: &str) -> String {
    line.trim().trim_end_matches([':', '.']).trim().to_lowercase()
}

/// The heading text if `line` looks like a section heading: a numbered
/// title (`2.1 Related Work`), a well-known section name, or a short
/// all-capitals line.
fn heading(line: &str) -> Option<String> {
    let line = line.trim();
    if let Some(c) = NUMBERED_HEADING.captures(line) {
        return Some(c[1].trim().to_string());
    }
    if NAMED_HEADINGS.contains(&heading_key(line).as_str()) {
        return Some(line.trim_end_matches([':', '.']).to_string());
    }
    let words = line.split_whitespace().count();
    let has_letters = line.chars().any(char::is_alphabetic);
    if (1..=6).contains(&words) && has_letters && !line.chars().any(char::is_lowercase) {
        return Some(line.to_string());
    }
    None
}

/// Section headings of an extracted document, in order of appearance.
pub fn section_headings(text: &str) -> Vec<String> {
    text.lines().filter_map(heading).collect()
}

/// Uses the source's abstract when there is one; otherwise cuts the text
/// between an "Abstract" line and the next heading of the document.
/// Section names of a paper: the headings after its abstract heading, or
/// every heading when there is none. Title lines set in capitals precede the
/// abstract and so drop out.
pub fn paper_sections(text: &str) -> Vec<String> {
    let headings = section_headings(text);
    match headings.iter().position(|h| heading_key(h) == "abstract") {
        Some(i) => headings[i + 1..].to_vec(),
        None => headings,
    }
}

pub fn extract_abstract(
    record: &PublicationRecord,
    document: Option<&SupportMaterial>,
    extractor: &dyn TextExtractor,
) -> Result<SupportMaterial, OrchestratorError> {
    if let Some(text) = record.r#abstract.as_deref().map(str::trim).filter(|t| !t.is_empty()) {
        return Ok(SupportMaterial {
            kind: MaterialKind::Abstract,
            url: None,
            title: None,
            text: Some(text.to_string()),
            verified: true,
            evidence: "metadata".into(),
        });
    }
    let url = document
        .and_then(|d| d.url.as_deref())
        .ok_or(OrchestratorError::AbstractNotFound)?;
    let extracted = extractor.extract(url);
    let text = abstract_section(&extracted.text).ok_or(OrchestratorError::AbstractNotFound)?;
    Ok(SupportMaterial {
        kind: MaterialKind::Abstract,
        url: Some(url.to_string()),
        title: None,
        text: Some(text),
        verified: false,
        evidence: "document:abstract-heading".into(),
    })
}

fn abstract_section(text: &str) -> Option<String> {
    let mut lines = text.lines().skip_while(|l| heading_key(l) != "abstract");
    lines.next()?;
    let body: Vec<&str> = lines
        .take_while(|l| heading(l).is_none())
        .flat_map(str::split_whitespace)
        .collect();
    (!body.is_empty()).then(|| body.join(" "))
}

/// Searches for slides as ppt, then pdf. A deck verifies when it mentions
/// "outline" or at least `min_sections` of the given section terms.
pub fn find_slides(
    record: &PublicationRecord,
    engine: &dyn SearchEngine,
    extractor: &dyn TextExtractor,
    section_terms: &[String],
    min_sections: usize,
) -> Result<SupportMaterial, OrchestratorError> {
    let phrase = title_phrase(record)?;
    let terms: Vec<String> = section_terms
        .iter()
        .map(|t| canonicalize(t))
        .filter(|t| !t.is_empty())
        .collect();
    let mut top: Option<(EngineHit, usize)> = None;
    for filetype in [FileType::Ppt, FileType::Pdf] {
        let query = EngineQuery {
            phrase: Some(phrase.clone()),
            terms: Vec::new(),
            filetype: Some(filetype),
        };
        for hit in engine_search(engine, &query)? {
            let text = canonicalize(&extractor.extract(&hit.url).text);
            if text.split(' ').any(|w| w == "outline") {
                return Ok(SupportMaterial::from_hit(
                    MaterialKind::Slides,
                    &hit,
                    true,
                    "outline".into(),
                ));
            }
            let found = terms.iter().filter(|t| contains_phrase(&text, t)).count();
            if min_sections > 0 && found >= min_sections {
                return Ok(SupportMaterial::from_hit(
                    MaterialKind::Slides,
                    &hit,
                    true,
                    format!("sections:{found}/{}", terms.len()),
                ));
            }
            top.get_or_insert((hit, found));
        }
    }
    let (hit, found) = top.ok_or(OrchestratorError::NoCandidates)?;
    Ok(SupportMaterial::from_hit(
        MaterialKind::Slides,
        &hit,
        false,
        format!("no outline; sections:{found}/{} below m={min_sections}", terms.len()),
    ))
}

/// Whole-word containment over canonical text.
fn contains_phrase(haystack: &str, needle: &str) -> bool {
    format!(" {haystack} ").contains(&format!(" {needle} "))
}

/// Family name of an author string: its last whitespace-separated token.
pub fn family_name(author: &str) -> Option<String> {
    author
        .split_whitespace()
        .last()
        .map(clean_token)
        .filter(|t| !t.is_empty())
}

/// Queries the blog engine with the title words plus the first author's
/// family name. Posts are returned unverified.
pub fn find_blog_posts(
    record: &PublicationRecord,
    engine: &dyn SearchEngine,
) -> Result<Vec<SupportMaterial>, OrchestratorError> {
    title_phrase(record)?;
    let family = record
        .authors
        .first()
        .and_then(|a| family_name(a))
        .ok_or(OrchestratorError::MissingAuthor)?;
    let mut terms: Vec<String> = record
        .title
        .split_whitespace()
        .map(clean_token)
        .filter(|t| !t.is_empty())
        .collect();
    terms.push(family);
    let query = EngineQuery {
        phrase: None,
        terms,
        filetype: None,
    };
    let hits = engine_search(engine, &query)?;
    if hits.is_empty() {
        return Err(OrchestratorError::NoCandidates);
    }
    Ok(hits
        .iter()
        .map(|h| SupportMaterial::from_hit(MaterialKind::BlogPost, h, false, "unverified:no-heuristic".into()))
        .collect())
}

/// Engines and settings used to gather support for one record.
pub struct SupportEngines<'a> {
    pub documents: Option<&'a dyn SearchEngine>,
    pub blogs: Option<&'a dyn SearchEngine>,
    pub extractor: &'a dyn TextExtractor,
    pub min_sections: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportFailure {
    pub kind: MaterialKind,
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SupportReport {
    pub materials: Vec<SupportMaterial>,
    pub failures: Vec<SupportFailure>,
}

impl SupportReport {
    fn fail(&mut self, kind: MaterialKind, err: &OrchestratorError) {
        self.failures.push(SupportFailure {
            kind,
            code: crate::ErrorCode::code(err).to_string(),
            message: err.to_string(),
        });
    }
}

/// Runs the requested lookups in order: document, abstract, slides, blog
/// posts. The document search also runs when only the abstract or slides
/// are wanted, since both read the document. A failed lookup is reported
/// and the others still run.
pub fn collect_support(
    record: &PublicationRecord,
    kinds: &[MaterialKind],
    engines: &SupportEngines<'_>,
) -> SupportReport {
    let wants = |k| kinds.contains(&k);
    let mut report = SupportReport::default();

    let needs_document = wants(MaterialKind::Document)
        || wants(MaterialKind::Slides)
        || (wants(MaterialKind::Abstract) && record.r#abstract.is_none());
    let document = if needs_document {
        let found = engines
            .documents
            .ok_or_else(|| OrchestratorError::EngineNotConfigured("document".into()))
            .and_then(|engine| find_document(record, engine, engines.extractor));
        match found {
            Ok(doc) => Some(doc),
            Err(e) => {
                if wants(MaterialKind::Document) {
                    report.fail(MaterialKind::Document, &e);
                }
                None
            }
        }
    } else {
        None
    };
    if let Some(doc) = document.as_ref().filter(|_| wants(MaterialKind::Document)) {
        report.materials.push(doc.clone());
    }

    if wants(MaterialKind::Abstract) {
        match extract_abstract(record, document.as_ref(), engines.extractor) {
            Ok(m) => report.materials.push(m),
            Err(e) => report.fail(MaterialKind::Abstract, &e),
        }
    }

    if wants(MaterialKind::Slides) {
        let sections = document
            .as_ref()
            .filter(|d| d.verified)
            .and_then(|d| d.url.as_deref())
            .map(|url| paper_sections(&engines.extractor.extract(url).text))
            .unwrap_or_default();
        let found = engines
            .documents
            .ok_or_else(|| OrchestratorError::EngineNotConfigured("document".into()))
            .and_then(|engine| find_slides(record, engine, engines.extractor, &sections, engines.min_sections));
        match found {
            Ok(m) => report.materials.push(m),
            Err(e) => report.fail(MaterialKind::Slides, &e),
        }
    }

    if wants(MaterialKind::BlogPost) {
        let found = engines
            .blogs
            .ok_or_else(|| OrchestratorError::EngineNotConfigured("blog".into()))
            .and_then(|engine| find_blog_posts(record, engine));
        match found {
            Ok(posts) => report.materials.extend(posts),
            Err(e) => report.fail(MaterialKind::BlogPost, &e),
        }
    }
    report
}
