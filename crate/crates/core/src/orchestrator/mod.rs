//! Search orchestration.
//!
//! Vertical search sends the expanded query to every selected publication
//! source at once, then cleans and deduplicates the merged lists. Horizontal
//! search ([`horizontal`]) looks for supporting material for one record.

pub mod horizontal;

use std::collections::BTreeSet;
use std::sync::mpsc;
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::cleaning::{normalize_records_with, CleaningError, VenueCatalog};
use crate::dedup::deduplicate_with;
use crate::error::ErrorCode;
use crate::exec::Execution;
use crate::expansion::ExpandedQuery;
use crate::record::PublicationRecord;
use crate::wrapper::{Fetcher, WrapperError, WrapperSource};

pub use horizontal::{
    collect_support, extract_abstract, find_blog_posts, find_document, find_slides, paper_sections, section_headings,
    EngineHit, EngineQuery, ExtractedText, FileType, MaterialKind, SearchEngine, SidecarExtractor, SupportEngines,
    SupportFailure, SupportMaterial, SupportReport, TextExtractor, WrapperEngine, DEFAULT_MIN_SECTIONS,
};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Error)]
pub enum OrchestratorError {
    #[error("invalid search task: {0}")]
    InvalidTask(String),
    #[error("source `{0}` is not registered")]
    UnknownSource(String),
    #[error("a source named `{0}` is already registered")]
    DuplicateSource(String),
    #[error("priority {0} is already taken")]
    DuplicatePriority(u32),
    #[error("every source failed")]
    AllSourcesFailed { diagnostics: Vec<SourceDiagnostic> },
    #[error(transparent)]
    Cleaning(#[from] CleaningError),
    #[error("search engine `{engine}` failed: {source}")]
    EngineFailed { engine: String, source: WrapperError },
    #[error("the engine returned no candidates")]
    NoCandidates,
    #[error("no abstract available")]
    AbstractNotFound,
    #[error("record has no title")]
    MissingTitle,
    #[error("record has no authors")]
    MissingAuthor,
    #[error("no {0} engine is configured")]
    EngineNotConfigured(String),
}

impl ErrorCode for OrchestratorError {
    fn code(&self) -> &'static str {
        match self {
            OrchestratorError::InvalidTask(_) => "InvalidTask",
            OrchestratorError::UnknownSource(_) => "UnknownSource",
            OrchestratorError::DuplicateSource(_) => "DuplicateSource",
            OrchestratorError::DuplicatePriority(_) => "DuplicatePriority",
            OrchestratorError::AllSourcesFailed { .. } => "AllSourcesFailed",
            OrchestratorError::Cleaning(e) => e.code(),
            OrchestratorError::EngineFailed { .. } => "EngineFailed",
            OrchestratorError::NoCandidates => "NoCandidates",
            OrchestratorError::AbstractNotFound => "AbstractNotFound",
            OrchestratorError::MissingTitle => "MissingTitle",
            OrchestratorError::MissingAuthor => "MissingAuthor",
            OrchestratorError::EngineNotConfigured(_) => "EngineNotConfigured",
        }
    }
}

/// A searchable publication source.
pub trait PublicationSource: Send + Sync {
    fn name(&self) -> &str;

    fn search(&self, query: &str, limit: usize, fetcher: &dyn Fetcher) -> Result<Vec<PublicationRecord>, WrapperError>;
}

impl PublicationSource for WrapperSource {
    fn name(&self) -> &str {
        WrapperSource::name(self)
    }

    fn search(&self, query: &str, limit: usize, fetcher: &dyn Fetcher) -> Result<Vec<PublicationRecord>, WrapperError> {
        WrapperSource::search(self, query, limit, fetcher)
    }
}

#[derive(Clone)]
pub struct RegisteredSource {
    pub priority: u32,
    pub source: Arc<dyn PublicationSource>,
}

/// Sources ordered by priority; a lower number wins duplicate ties.
#[derive(Clone, Default)]
pub struct SourceRegistry {
    entries: Vec<RegisteredSource>,
}

impl SourceRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, priority: u32, source: Arc<dyn PublicationSource>) -> Result<(), OrchestratorError> {
        if self.get(source.name()).is_some() {
            return Err(OrchestratorError::DuplicateSource(source.name().to_string()));
        }
        if self.entries.iter().any(|e| e.priority == priority) {
            return Err(OrchestratorError::DuplicatePriority(priority));
        }
        let at = self.entries.partition_point(|e| e.priority < priority);
        self.entries.insert(at, RegisteredSource { priority, source });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&RegisteredSource> {
        self.entries.iter().find(|e| e.source.name() == name)
    }

    /// Names in priority order.
    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.source.name().to_string()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RegisteredSource> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchTask {
    pub task_id: String,
    pub query: ExpandedQuery,
    pub sources: Vec<String>,
    /// Maximum records taken from each source.
    pub limit: usize,
}

impl SearchTask {
    pub fn new(query: ExpandedQuery, sources: Vec<String>, limit: usize) -> Self {
        SearchTask {
            task_id: uuid::Uuid::new_v4().to_string(),
            query,
            sources,
            limit,
        }
    }

    pub fn validate(&self) -> Result<(), OrchestratorError> {
        if self.limit == 0 {
            return Err(OrchestratorError::InvalidTask("limit must be at least 1".into()));
        }
        if self.sources.is_empty() {
            return Err(OrchestratorError::InvalidTask("no sources selected".into()));
        }
        let mut seen = BTreeSet::new();
        for s in &self.sources {
            if !seen.insert(s) {
                return Err(OrchestratorError::InvalidTask(format!("source `{s}` listed twice")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SourceStatus {
    Ok { records: usize },
    Failed { code: String, message: String },
    TimedOut,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceDiagnostic {
    pub source: String,
    pub priority: u32,
    #[serde(flatten)]
    pub status: SourceStatus,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerticalOutcome {
    pub records: Vec<PublicationRecord>,
    /// One entry per selected source, in priority order.
    pub diagnostics: Vec<SourceDiagnostic>,
    pub comparisons: usize,
    pub duplicates_removed: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct VerticalOptions {
    pub timeout: Duration,
    pub exec: Execution,
}

impl Default for VerticalOptions {
    fn default() -> Self {
        VerticalOptions {
            timeout: DEFAULT_TIMEOUT,
            exec: Execution::default(),
        }
    }
}

type SourceResult = Result<Vec<PublicationRecord>, WrapperError>;

pub fn vertical_search(
    task: &SearchTask,
    registry: &SourceRegistry,
    catalog: &VenueCatalog,
    fetcher: Arc<dyn Fetcher>,
) -> Result<VerticalOutcome, OrchestratorError> {
    vertical_search_with(task, registry, catalog, fetcher, VerticalOptions::default())
}

/// Queries the task's sources concurrently, one thread each.
///
/// A source that errors or misses the deadline contributes nothing and is
/// reported in the diagnostics. Completed lists are truncated to the task
/// limit, venue-normalised and deduplicated in priority order, so the output
/// never depends on which source answered first.
pub fn vertical_search_with(
    task: &SearchTask,
    registry: &SourceRegistry,
    catalog: &VenueCatalog,
    fetcher: Arc<dyn Fetcher>,
    options: VerticalOptions,
) -> Result<VerticalOutcome, OrchestratorError> {
    task.validate()?;
    let mut selected: Vec<RegisteredSource> = task
        .sources
        .iter()
        .map(|name| {
            registry
                .get(name)
                .cloned()
                .ok_or_else(|| OrchestratorError::UnknownSource(name.clone()))
        })
        .collect::<Result<_, _>>()?;
    selected.sort_by_key(|s| s.priority);

    let query = task.query.query_string();
    let (tx, rx) = mpsc::channel();
    let started = Instant::now();
    for (slot, entry) in selected.iter().enumerate() {
        let tx = tx.clone();
        let source = Arc::clone(&entry.source);
        let fetcher = Arc::clone(&fetcher);
        let query = query.clone();
        let limit = task.limit;
        thread::spawn(move || {
            let t0 = Instant::now();
            let result = source.search(&query, limit, &*fetcher);
            // the receiver may be gone after a timeout
            let _ = tx.send((slot, result, t0.elapsed()));
        });
    }
    drop(tx);

    let mut results: Vec<Option<(SourceResult, Duration)>> = selected.iter().map(|_| None).collect();
    let deadline = started + options.timeout;
    let mut pending = selected.len();
    while pending > 0 {
        let remaining = deadline.saturating_duration_since(Instant::now());
        match rx.recv_timeout(remaining) {
            Ok((slot, result, elapsed)) => {
                results[slot] = Some((result, elapsed));
                pending -= 1;
            }
            Err(_) => break,
        }
    }

    let mut diagnostics = Vec::with_capacity(selected.len());
    let mut per_source = Vec::new();
    for (entry, result) in selected.iter().zip(results) {
        let name = entry.source.name().to_string();
        let (status, elapsed) = match result {
            Some((Ok(mut records), elapsed)) => {
                records.truncate(task.limit);
                let status = SourceStatus::Ok { records: records.len() };
                per_source.push((name.clone(), records));
                (status, elapsed)
            }
            Some((Err(e), elapsed)) => {
                log::warn!("source {name} failed: {e}");
                let status = SourceStatus::Failed {
                    code: e.code().to_string(),
                    message: e.to_string(),
                };
                (status, elapsed)
            }
            None => {
                log::warn!("source {name} timed out after {:?}", options.timeout);
                (SourceStatus::TimedOut, options.timeout)
            }
        };
        diagnostics.push(SourceDiagnostic {
            source: name,
            priority: entry.priority,
            status,
            elapsed_ms: elapsed.as_millis() as u64,
        });
    }
    if per_source.is_empty() {
        return Err(OrchestratorError::AllSourcesFailed { diagnostics });
    }

    let per_source = per_source
        .into_iter()
        .map(|(name, records)| Ok((name, normalize_records_with(records, catalog, options.exec)?)))
        .collect::<Result<Vec<_>, CleaningError>>()?;
    let outcome = deduplicate_with(&per_source, options.exec);
    Ok(VerticalOutcome {
        records: outcome.records,
        diagnostics,
        comparisons: outcome.comparisons,
        duplicates_removed: outcome.removed,
    })
}
