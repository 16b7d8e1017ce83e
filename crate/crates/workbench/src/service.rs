//! The creativity cycle as plain method calls: preview, search, facet,
//! support, import, save. The HTTP layer and the CLI are thin wrappers.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};
use std::time::Duration;

use mindforge_core::cleaning::{CleaningError, VenueCatalog};
use mindforge_core::expansion::{
    compute_neighbourhood, expand_query, refine_neighbourhood, DocWeights, ExpandedQuery, ExpansionError, ScoredTerm,
};
use mindforge_core::mindmap::{parse_mindmap, serialize_mindmap, Mindmap, MindmapError};
use mindforge_core::orchestrator::{
    collect_support, vertical_search_with, ExtractedText, MaterialKind, OrchestratorError, SearchTask,
    SidecarExtractor, SourceDiagnostic, SourceRegistry, SupportEngines, SupportMaterial, SupportReport, TextExtractor,
    VerticalOptions, WrapperEngine,
};
use mindforge_core::organizer::{build_mm_subtree, group_results, import_into, FacetSpec, IdSource, OrganizerError};
use mindforge_core::text::{StopwordList, DEFAULT_STOPWORDS};
use mindforge_core::wrapper::{parse_config, Fetcher, FixtureFetcher, ResultMapping, WrapperError, WrapperSource};
use mindforge_core::{ErrorCode, PublicationRecord, VenueRef};
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, EngineConfig, FetchConfig, ServiceConfig};
use crate::http::HttpFetcher;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Mindmap(#[from] MindmapError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Orchestrator(#[from] OrchestratorError),
    #[error(transparent)]
    Organizer(#[from] OrganizerError),
    #[error(transparent)]
    Cleaning(#[from] CleaningError),
    #[error(transparent)]
    Wrapper(#[from] WrapperError),
    #[error("no search session `{0}`")]
    SessionNotFound(String),
    #[error("record index {index} out of range for {len} records")]
    RecordIndex { index: usize, len: usize },
    #[error("{0}")]
    InvalidRequest(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl ErrorCode for ServiceError {
    fn code(&self) -> &'static str {
        match self {
            ServiceError::Config(e) => e.code(),
            ServiceError::Mindmap(e) => e.code(),
            ServiceError::Expansion(e) => e.code(),
            ServiceError::Orchestrator(e) => e.code(),
            ServiceError::Organizer(e) => e.code(),
            ServiceError::Cleaning(e) => e.code(),
            ServiceError::Wrapper(e) => e.code(),
            ServiceError::SessionNotFound(_) => "SessionNotFound",
            ServiceError::RecordIndex { .. } => "RecordIndexOutOfRange",
            ServiceError::InvalidRequest(_) => "InvalidRequest",
            ServiceError::Io { .. } => "IoError",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreviewRequest {
    #[serde(default)]
    pub base_query: String,
    pub selected_ids: Vec<String>,
    pub level: Option<usize>,
    pub k: Option<usize>,
    #[serde(default)]
    pub add_ids: Vec<String>,
    #[serde(default)]
    pub remove_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreviewResponse {
    pub neighbourhood_ids: Vec<String>,
    pub terms: Vec<ScoredTerm>,
    pub query: String,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchRequest {
    #[serde(default)]
    pub base_query: String,
    #[serde(default)]
    pub selected_ids: Vec<String>,
    pub level: Option<usize>,
    pub k: Option<usize>,
    #[serde(default)]
    pub add_ids: Vec<String>,
    #[serde(default)]
    pub remove_ids: Vec<String>,
    /// All registered sources when absent.
    pub sources: Option<Vec<String>>,
    pub limit: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchSummary {
    pub task_id: String,
    pub query: String,
    pub record_count: usize,
    pub duplicates_removed: usize,
    pub diagnostics: Vec<SourceDiagnostic>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchSession {
    pub task_id: String,
    pub task: SearchTask,
    pub records: Vec<PublicationRecord>,
    /// Materials gathered so far, by record index.
    pub support: BTreeMap<usize, Vec<SupportMaterial>>,
    pub diagnostics: Vec<SourceDiagnostic>,
    pub comparisons: usize,
    pub duplicates_removed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupView {
    pub label: String,
    /// Positions in the session's record list.
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultsView {
    pub task_id: String,
    pub query: String,
    pub records: Vec<PublicationRecord>,
    pub diagnostics: Vec<SourceDiagnostic>,
    pub support: BTreeMap<usize, Vec<SupportMaterial>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub facet: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<GroupView>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportRequest {
    pub record_index: usize,
    /// Every kind when absent.
    pub kinds: Option<Vec<MaterialKind>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImportRequest {
    pub task_id: String,
    pub record_indices: Vec<usize>,
    pub target_node_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImportResponse {
    pub imported: usize,
    pub skipped: usize,
    /// Root ids of the subtrees actually attached.
    pub node_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaveResponse {
    pub path: PathBuf,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceView {
    pub name: String,
    pub priority: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourcesView {
    pub sources: Vec<SourceView>,
    pub engines: BTreeMap<String, String>,
}

const ALL_KINDS: [MaterialKind; 4] = [
    MaterialKind::Document,
    MaterialKind::Abstract,
    MaterialKind::Slides,
    MaterialKind::BlogPost,
];

struct NoExtractor;

impl TextExtractor for NoExtractor {
    fn extract(&self, _url: &str) -> ExtractedText {
        ExtractedText {
            text: String::new(),
            ok: false,
        }
    }
}

pub struct Workbench {
    config: ServiceConfig,
    map: RwLock<Mindmap>,
    registry: SourceRegistry,
    catalog: VenueCatalog,
    stopwords: StopwordList,
    weights: DocWeights,
    fetcher: Arc<dyn Fetcher>,
    extractor: Arc<dyn TextExtractor>,
    documents: Option<WrapperEngine>,
    blogs: Option<WrapperEngine>,
    sessions: RwLock<HashMap<String, SearchSession>>,
    ids: Mutex<IdSource>,
}

fn read(path: &std::path::Path) -> Result<String, ServiceError> {
    std::fs::read_to_string(path).map_err(|source| {
        ServiceError::Config(ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

fn wrapper_source(
    name: &str,
    config_path: &std::path::Path,
    mapping: &BTreeMap<String, String>,
    query_var: Option<&str>,
) -> Result<WrapperSource, ServiceError> {
    let config = parse_config(&read(config_path)?)?;
    let mut source = WrapperSource::new(name, config, ResultMapping::from_pairs(mapping)?)?;
    if let Some(var) = query_var {
        source = source.with_query_var(var);
    }
    Ok(source)
}

fn engine(declared: &Option<EngineConfig>, fetcher: &Arc<dyn Fetcher>) -> Result<Option<WrapperEngine>, ServiceError> {
    declared
        .as_ref()
        .map(|e| {
            let source = wrapper_source(&e.name, &e.config_path, &e.result_mapping, e.query_var.as_deref())?;
            Ok(WrapperEngine::new(source, Arc::clone(fetcher))?)
        })
        .transpose()
}

impl Workbench {
    /// Load everything the config names. Any failure is fatal.
    pub fn from_config(config: ServiceConfig) -> Result<Self, ServiceError> {
        let fetcher: Arc<dyn Fetcher>;
        let text_dir;
        match &config.fetch {
            FetchConfig::Http {
                timeout_s,
                user_agent,
                text_dir: dir,
            } => {
                fetcher = Arc::new(HttpFetcher::new(Duration::from_secs(*timeout_s), user_agent.as_deref()));
                text_dir = dir.clone();
            }
            FetchConfig::Fixtures {
                fixture_dir,
                text_dir: dir,
            } => {
                fetcher = Arc::new(FixtureFetcher::new(fixture_dir));
                text_dir = Some(dir.clone().unwrap_or_else(|| fixture_dir.clone()));
            }
        }
        Self::with_fetcher(config, fetcher, text_dir)
    }

    /// Like [`Workbench::from_config`] but with the given fetcher.
    pub fn with_fetcher(
        config: ServiceConfig,
        fetcher: Arc<dyn Fetcher>,
        text_dir: Option<PathBuf>,
    ) -> Result<Self, ServiceError> {
        let mut map = parse_mindmap(&read(&config.mindmap_path)?)?;
        map.source_path = Some(config.mindmap_path.clone());
        let catalog = match &config.catalog_path {
            Some(p) => VenueCatalog::load(p)?,
            None => VenueCatalog::sample(),
        };
        let stopwords = match &config.stopword_path {
            Some(p) => StopwordList::parse(&read(p)?),
            None => StopwordList::parse(DEFAULT_STOPWORDS),
        };
        let weights = DocWeights::with_overrides(config.weight_overrides())?;

        let mut registry = SourceRegistry::new();
        for s in &config.sources {
            let source = wrapper_source(&s.name, &s.config_path, &s.result_mapping, s.query_var.as_deref())?;
            registry.register(s.priority, Arc::new(source))?;
        }
        let documents = engine(&config.engines.horizontal, &fetcher)?;
        let blogs = engine(&config.engines.blog, &fetcher)?;
        let extractor: Arc<dyn TextExtractor> = match text_dir {
            Some(dir) => Arc::new(SidecarExtractor::new(dir)),
            None => Arc::new(NoExtractor),
        };

        Ok(Workbench {
            config,
            map: RwLock::new(map),
            registry,
            catalog,
            stopwords,
            weights,
            fetcher,
            extractor,
            documents,
            blogs,
            sessions: RwLock::new(HashMap::new()),
            ids: Mutex::new(IdSource::Random),
        })
    }

    /// Use predictable ids for imported nodes.
    pub fn with_id_source(self, ids: IdSource) -> Self {
        *self.ids.lock().expect("id lock") = ids;
        self
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    pub fn mindmap(&self) -> Mindmap {
        self.map.read().expect("map lock").clone()
    }

    pub fn replace_mindmap(&self, map: Mindmap) -> Result<(), ServiceError> {
        map.validate()?;
        let mut current = self.map.write().expect("map lock");
        let source_path = current.source_path.take();
        *current = Mindmap { source_path, ..map };
        Ok(())
    }

    /// Writes the map to its file through a temporary file and a rename.
    pub fn save(&self) -> Result<SaveResponse, ServiceError> {
        let text = serialize_mindmap(&self.map.read().expect("map lock"));
        let path = self.config.mindmap_path.clone();
        let io = |source| ServiceError::Io {
            path: path.clone(),
            source,
        };
        let dir = path
            .parent()
            .filter(|d| !d.as_os_str().is_empty())
            .unwrap_or(std::path::Path::new("."));
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        std::io::Write::write_all(&mut tmp, text.as_bytes()).map_err(io)?;
        tmp.persist(&path).map_err(|e| io(e.error))?;
        Ok(SaveResponse {
            path,
            bytes: text.len(),
        })
    }

    fn expand(&self, map: &Mindmap, req: &PreviewRequest) -> Result<(Vec<String>, ExpandedQuery), ServiceError> {
        let level = req.level.unwrap_or(self.config.defaults.level);
        let k = req.k.unwrap_or(self.config.defaults.k);
        let hood = compute_neighbourhood(map, &req.selected_ids, level)?;
        let hood = refine_neighbourhood(map, &hood, &req.add_ids, &req.remove_ids)?;
        let query = expand_query(&req.base_query, map, &hood, &self.weights, &self.stopwords, k)?;
        Ok((hood.included_ids.into_iter().collect(), query))
    }

    pub fn preview(&self, req: &PreviewRequest) -> Result<PreviewResponse, ServiceError> {
        let map = self.map.read().expect("map lock");
        let (ids, query) = self.expand(&map, req)?;
        Ok(PreviewResponse {
            neighbourhood_ids: ids,
            query: query.query_string(),
            terms: query.expansion_terms,
        })
    }

    /// Runs a vertical search and keeps the result as a session.
    pub fn search(&self, req: &SearchRequest) -> Result<SearchSummary, ServiceError> {
        let query = if req.selected_ids.is_empty() {
            if req.base_query.trim().is_empty() {
                return Err(ServiceError::InvalidRequest(
                    "give a base_query, selected_ids or both".into(),
                ));
            }
            ExpandedQuery::unexpanded(&req.base_query)
        } else {
            let selection = PreviewRequest {
                base_query: req.base_query.clone(),
                selected_ids: req.selected_ids.clone(),
                level: req.level,
                k: req.k,
                add_ids: req.add_ids.clone(),
                remove_ids: req.remove_ids.clone(),
            };
            self.expand(&self.map.read().expect("map lock"), &selection)?.1
        };
        let sources = req.sources.clone().unwrap_or_else(|| self.registry.names());
        let task = SearchTask::new(query, sources, req.limit.unwrap_or(self.config.defaults.limit));
        let options = VerticalOptions {
            timeout: Duration::from_secs(self.config.defaults.timeout_s),
            ..VerticalOptions::default()
        };
        let outcome = vertical_search_with(&task, &self.registry, &self.catalog, Arc::clone(&self.fetcher), options)?;
        let session = SearchSession {
            task_id: task.task_id.clone(),
            records: outcome.records,
            support: BTreeMap::new(),
            diagnostics: outcome.diagnostics,
            comparisons: outcome.comparisons,
            duplicates_removed: outcome.duplicates_removed,
            task,
        };
        let summary = SearchSummary {
            task_id: session.task_id.clone(),
            query: session.task.query.query_string(),
            record_count: session.records.len(),
            duplicates_removed: session.duplicates_removed,
            diagnostics: session.diagnostics.clone(),
        };
        self.sessions
            .write()
            .expect("session lock")
            .insert(session.task_id.clone(), session);
        Ok(summary)
    }

    pub fn session(&self, task_id: &str) -> Result<SearchSession, ServiceError> {
        self.sessions
            .read()
            .expect("session lock")
            .get(task_id)
            .cloned()
            .ok_or_else(|| ServiceError::SessionNotFound(task_id.to_string()))
    }

    /// Session records, grouped when `facet` is given (`date`, `forum`,
    /// `author` or `regex:<field>:<pattern>`).
    pub fn results(&self, task_id: &str, facet: Option<&str>) -> Result<ResultsView, ServiceError> {
        let session = self.session(task_id)?;
        let groups = match facet {
            Some(spec) => {
                let spec: FacetSpec = spec.parse()?;
                let position: HashMap<(&str, usize), usize> = session
                    .records
                    .iter()
                    .enumerate()
                    .map(|(i, r)| ((r.source_id.as_str(), r.source_rank), i))
                    .collect();
                let groups = group_results(&session.records, &spec)?
                    .into_iter()
                    .map(|g| GroupView {
                        indices: g
                            .records
                            .iter()
                            .map(|r| position[&(r.source_id.as_str(), r.source_rank)])
                            .collect(),
                        label: g.label,
                    })
                    .collect();
                Some(groups)
            }
            None => None,
        };
        Ok(ResultsView {
            task_id: session.task_id,
            query: session.task.query.query_string(),
            records: session.records,
            diagnostics: session.diagnostics,
            support: session.support,
            facet: facet.map(str::to_string),
            groups,
        })
    }

    /// Gathers supporting material for one record and remembers it for a
    /// later import.
    pub fn support(&self, task_id: &str, req: &SupportRequest) -> Result<SupportReport, ServiceError> {
        let session = self.session(task_id)?;
        let record = session.records.get(req.record_index).ok_or(ServiceError::RecordIndex {
            index: req.record_index,
            len: session.records.len(),
        })?;
        let kinds = req.kinds.clone().unwrap_or_else(|| ALL_KINDS.to_vec());
        let engines = SupportEngines {
            documents: self.documents.as_ref().map(|e| e as _),
            blogs: self.blogs.as_ref().map(|e| e as _),
            extractor: &*self.extractor,
            min_sections: self.config.defaults.m_sections,
        };
        let report = collect_support(record, &kinds, &engines);

        let mut sessions = self.sessions.write().expect("session lock");
        if let Some(stored) = sessions.get_mut(task_id) {
            let materials = stored.support.entry(req.record_index).or_default();
            materials.retain(|m| !kinds.contains(&m.kind));
            materials.extend(report.materials.iter().cloned());
        }
        Ok(report)
    }

    /// Imports records with their gathered material under a map node.
    /// Re-importing a record already under the node is a no-op.
    pub fn import(&self, req: &ImportRequest) -> Result<ImportResponse, ServiceError> {
        let session = self.session(&req.task_id)?;
        let mut subtrees = Vec::with_capacity(req.record_indices.len());
        {
            let mut ids = self.ids.lock().expect("id lock");
            for &index in &req.record_indices {
                let record = session.records.get(index).ok_or(ServiceError::RecordIndex {
                    index,
                    len: session.records.len(),
                })?;
                let materials = session.support.get(&index).map(Vec::as_slice).unwrap_or_default();
                subtrees.push(build_mm_subtree(record, materials, &mut ids));
            }
        }
        let roots: Vec<String> = subtrees.iter().map(|s| s.id.clone()).collect();
        let mut map = self.map.write().expect("map lock");
        let report = import_into(&mut map, &req.target_node_id, subtrees)?;
        Ok(ImportResponse {
            imported: report.imported,
            skipped: report.skipped,
            node_ids: roots.into_iter().filter(|id| map.contains(id)).collect(),
        })
    }

    pub fn venues(&self) -> Vec<VenueRef> {
        self.catalog.entries().cloned().collect()
    }

    pub fn sources(&self) -> SourcesView {
        let mut engines = BTreeMap::new();
        if let Some(e) = &self.config.engines.horizontal {
            engines.insert("horizontal".to_string(), e.name.clone());
        }
        if let Some(e) = &self.config.engines.blog {
            engines.insert("blog".to_string(), e.name.clone());
        }
        SourcesView {
            sources: self
                .registry
                .iter()
                .map(|s| SourceView {
                    name: s.source.name().to_string(),
                    priority: s.priority,
                })
                .collect(),
            engines,
        }
    }
}
