//! Service configuration, read from a TOML file.
//!
//! Relative paths are resolved against the directory holding the file.
//!
//! ```toml
//! mindmap_path = "mindmaps/sec6-microrna.mm"
//! catalog_path = "catalog/venues.tsv"
//!
//! [defaults]
//! k = 4
//!
//! [fetch]
//! mode = "fixtures"
//! fixture_dir = "web"
//!
//! [[sources]]
//! name = "dblp"
//! config_path = "wrappers/dblp.xml"
//! priority = 1
//! result_mapping = { title = "titles", url = "titles@href" }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use mindforge_core::mindmap::ElementKind;
use mindforge_core::orchestrator::DEFAULT_MIN_SECTIONS;
use serde::{Deserialize, Serialize};

pub const CONFIG_ENV: &str = "MINDFORGE_CONFIG";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("no configuration file given (use --config or {CONFIG_ENV})")]
    Missing,
}

impl mindforge_core::ErrorCode for ConfigError {
    fn code(&self) -> &'static str {
        "ConfigError"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_level")]
    pub level: usize,
    #[serde(default = "default_limit")]
    pub limit: usize,
    #[serde(default = "default_timeout")]
    pub timeout_s: u64,
    #[serde(default = "default_sections")]
    pub m_sections: usize,
}

fn default_k() -> usize {
    mindforge_core::expansion::DEFAULT_K
}
fn default_level() -> usize {
    mindforge_core::expansion::DEFAULT_LEVEL
}
fn default_limit() -> usize {
    30
}
fn default_timeout() -> u64 {
    mindforge_core::orchestrator::DEFAULT_TIMEOUT.as_secs()
}
fn default_sections() -> usize {
    DEFAULT_MIN_SECTIONS
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            k: default_k(),
            level: default_level(),
            limit: default_limit(),
            timeout_s: default_timeout(),
            m_sections: default_sections(),
        }
    }
}

/// Where pages come from. Fixture mode never touches the network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum FetchConfig {
    Http {
        #[serde(default = "default_timeout")]
        timeout_s: u64,
        #[serde(default)]
        user_agent: Option<String>,
        /// Sidecar text directory for document extraction, if any.
        #[serde(default)]
        text_dir: Option<PathBuf>,
    },
    Fixtures {
        fixture_dir: PathBuf,
        /// Defaults to `fixture_dir`.
        #[serde(default)]
        text_dir: Option<PathBuf>,
    },
}

impl Default for FetchConfig {
    fn default() -> Self {
        FetchConfig::Http {
            timeout_s: default_timeout(),
            user_agent: None,
            text_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub name: String,
    pub config_path: PathBuf,
    pub priority: u32,
    pub result_mapping: BTreeMap<String, String>,
    #[serde(default)]
    pub query_var: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    pub name: String,
    pub config_path: PathBuf,
    pub result_mapping: BTreeMap<String, String>,
    #[serde(default)]
    pub query_var: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfigs {
    /// Web search used for documents and slides.
    pub horizontal: Option<EngineConfig>,
    pub blog: Option<EngineConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    pub mindmap_path: PathBuf,
    /// The bundled sample catalog when absent.
    #[serde(default)]
    pub catalog_path: Option<PathBuf>,
    /// The bundled English list when absent.
    #[serde(default)]
    pub stopword_path: Option<PathBuf>,
    /// Overrides keyed by kind name, e.g. `topic = 2.5`.
    #[serde(default)]
    pub doc_weights: BTreeMap<String, f64>,
    #[serde(default)]
    pub defaults: Defaults,
    #[serde(default)]
    pub fetch: FetchConfig,
    #[serde(default)]
    pub sources: Vec<SourceConfig>,
    #[serde(default)]
    pub engines: EngineConfigs,
    /// Built web UI assets, served at `/` when set.
    #[serde(default)]
    pub static_dir: Option<PathBuf>,
}

/// The config path to use: `MINDFORGE_CONFIG` wins over the flag.
pub fn resolve_config_path(flag: Option<PathBuf>) -> Result<PathBuf, ConfigError> {
    std::env::var_os(CONFIG_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or(flag)
        .ok_or(ConfigError::Missing)
}

impl ServiceConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    /// Parse, resolve paths against `base` and validate.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut config: ServiceConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: PathBuf::new(),
            message: e.message().to_string(),
        })?;
        config.resolve(base);
        config.validate()?;
        Ok(config)
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.mindmap_path);
        self.catalog_path.iter_mut().for_each(fix);
        self.stopword_path.iter_mut().for_each(fix);
        self.static_dir.iter_mut().for_each(fix);
        match &mut self.fetch {
            FetchConfig::Http { text_dir, .. } => text_dir.iter_mut().for_each(fix),
            FetchConfig::Fixtures { fixture_dir, text_dir } => {
                fix(fixture_dir);
                text_dir.iter_mut().for_each(fix);
            }
        }
        for s in &mut self.sources {
            fix(&mut s.config_path);
        }
        for e in [&mut self.engines.horizontal, &mut self.engines.blog]
            .into_iter()
            .flatten()
        {
            fix(&mut e.config_path);
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        let mut names = BTreeSet::new();
        let mut priorities = BTreeSet::new();
        for s in &self.sources {
            if !names.insert(&s.name) {
                return invalid(format!("source `{}` declared twice", s.name));
            }
            if !priorities.insert(s.priority) {
                return invalid(format!("priority {} used by more than one source", s.priority));
            }
        }
        for (kind, weight) in &self.doc_weights {
            if ElementKind::from_name(kind).is_none() {
                return invalid(format!("unknown element kind `{kind}` in doc_weights"));
            }
            if !(weight.is_finite() && *weight > 0.0) {
                return invalid(format!("weight for `{kind}` must be positive, got {weight}"));
            }
        }
        let d = &self.defaults;
        if d.level == 0 || d.limit == 0 || d.timeout_s == 0 {
            return invalid("defaults.level, defaults.limit and defaults.timeout_s must be positive".into());
        }

        let mut files: Vec<&Path> = vec![&self.mindmap_path];
        files.extend(self.catalog_path.as_deref());
        files.extend(self.stopword_path.as_deref());
        files.extend(self.sources.iter().map(|s| s.config_path.as_path()));
        files.extend(
            [&self.engines.horizontal, &self.engines.blog]
                .into_iter()
                .flatten()
                .map(|e| e.config_path.as_path()),
        );
        for f in files {
            if !f.is_file() {
                return invalid(format!("file {} does not exist", f.display()));
            }
        }
        let mut dirs: Vec<&Path> = self.static_dir.iter().map(PathBuf::as_path).collect();
        match &self.fetch {
            FetchConfig::Http { text_dir, .. } => dirs.extend(text_dir.as_deref()),
            FetchConfig::Fixtures { fixture_dir, text_dir } => {
                dirs.push(fixture_dir);
                dirs.extend(text_dir.as_deref());
            }
        }
        for d in dirs {
            if !d.is_dir() {
                return invalid(format!("directory {} does not exist", d.display()));
            }
        }
        Ok(())
    }

    /// Parsed per-kind weight overrides.
    pub fn weight_overrides(&self) -> Vec<(ElementKind, f64)> {
        self.doc_weights
            .iter()
            .filter_map(|(k, w)| ElementKind::from_name(k).map(|kind| (kind, *w)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dir() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("map.mm"), "<map><node ID=\"r\" TEXT=\"r\"/></map>").unwrap();
        std::fs::write(dir.path().join("w.xml"), "<config/>").unwrap();
        dir
    }

    #[test]
    fn minimal_config_gets_defaults_and_resolved_paths() {
        let d = dir();
        let c = ServiceConfig::parse("mindmap_path = \"map.mm\"", d.path()).unwrap();
        assert_eq!(c.mindmap_path, d.path().join("map.mm"));
        assert_eq!(c.defaults, Defaults::default());
        assert_eq!((c.defaults.k, c.defaults.level, c.defaults.m_sections), (4, 1, 2));
        assert!(matches!(c.fetch, FetchConfig::Http { timeout_s: 10, .. }));
    }

    #[test]
    fn duplicate_priorities_rejected() {
        let d = dir();
        let text = r#"
            mindmap_path = "map.mm"
            [[sources]]
            name = "a"
            config_path = "w.xml"
            priority = 1
            result_mapping = { title = "t" }
            [[sources]]
            name = "b"
            config_path = "w.xml"
            priority = 1
            result_mapping = { title = "t" }
        "#;
        let err = ServiceConfig::parse(text, d.path()).unwrap_err();
        assert!(err.to_string().contains("priority 1"), "{err}");
    }

    #[test]
    fn missing_files_and_bad_weights_rejected() {
        let d = dir();
        let err = ServiceConfig::parse("mindmap_path = \"nope.mm\"", d.path()).unwrap_err();
        assert!(err.to_string().contains("nope.mm"), "{err}");
        let err =
            ServiceConfig::parse("mindmap_path = \"map.mm\"\n[doc_weights]\nflavour = 1.0", d.path()).unwrap_err();
        assert!(err.to_string().contains("flavour"), "{err}");
        let err = ServiceConfig::parse("mindmap_path = \"map.mm\"\n[doc_weights]\ntopic = 0.0", d.path()).unwrap_err();
        assert!(err.to_string().contains("positive"), "{err}");
        let err = ServiceConfig::parse("mindmap_path = \"map.mm\"\nsurprise = 1", d.path()).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }), "{err}");
    }

    #[test]
    fn fixture_mode_parses() {
        let d = dir();
        let text = "mindmap_path = \"map.mm\"\n[fetch]\nmode = \"fixtures\"\nfixture_dir = \".\"";
        let c = ServiceConfig::parse(text, d.path()).unwrap();
        assert_eq!(
            c.fetch,
            FetchConfig::Fixtures {
                fixture_dir: d.path().join("."),
                text_dir: None
            }
        );
    }
}
