//! The `mindforge` command line. Exit status is 0 on success, 1 on error and
//! 2 on a usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use mindforge_core::cleaning::{match_venue, normalize_records, VenueCatalog};
use mindforge_core::dedup::deduplicate_with;
use mindforge_core::expansion::{compute_neighbourhood, expand_query, DocWeights, ExpandedQuery};
use mindforge_core::mindmap::parse_mindmap;
use mindforge_core::text::{StopwordList, DEFAULT_STOPWORDS};
use mindforge_core::wrapper::{execute, fixture_key, parse_config, FixtureFetcher};
use mindforge_core::{ErrorCode, Execution, PublicationRecord};
use serde_json::json;

use crate::config::{resolve_config_path, ServiceConfig};
use crate::service::{PreviewResponse, SearchRequest, Workbench};

#[derive(Debug, Parser)]
#[command(name = "mindforge", version, about = "Mind-map driven literature search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the HTTP service.
    Serve {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
    /// Expand a query from selected map elements; prints JSON.
    Expand {
        /// Mind-map file.
        #[arg(long)]
        map: PathBuf,
        /// Selected element ids.
        #[arg(long = "select", value_delimiter = ',')]
        select: Vec<String>,
        #[arg(long, default_value_t = mindforge_core::expansion::DEFAULT_LEVEL)]
        level: usize,
        #[arg(long, default_value_t = mindforge_core::expansion::DEFAULT_K)]
        k: usize,
        /// Base query typed by the user.
        #[arg(long, default_value = "")]
        base: String,
        #[arg(long)]
        stopwords: Option<PathBuf>,
    },
    /// Search the configured sources; prints one JSON record per line.
    Search {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value = "")]
        query: String,
        #[arg(long = "select", value_delimiter = ',')]
        select: Vec<String>,
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Sources to query; all when omitted.
        #[arg(long = "source", value_delimiter = ',')]
        sources: Vec<String>,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Remove duplicates from a JSON-lines record file.
    Dedupe {
        input: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Source names from highest to lowest priority. Unlisted sources
        /// follow in order of first appearance.
        #[arg(long, value_delimiter = ',')]
        priority: Vec<String>,
        /// Match venue strings against the catalog before comparing.
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Print the catalog entry closest to a venue string.
    MatchVenue {
        venue: String,
        /// Tab-separated catalog; the built-in sample when omitted.
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Run a wrapper config against saved pages and print its bindings.
    Scrape {
        #[arg(long)]
        wrapper: PathBuf,
        /// Directory of pages named by `fixture-key`.
        #[arg(long)]
        fixtures: PathBuf,
        /// `name=value` parameters.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, String)>,
    },
    /// Print the file stem a URL is stored under in a fixture directory.
    FixtureKey { url: String },
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Service config; `MINDFORGE_CONFIG` takes precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_param(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .ok_or_else(|| format!("expected name=value, got `{s}`"))
}

#[derive(Debug)]
pub struct CliError {
    pub code: String,
    pub message: String,
}

impl<E: ErrorCode + std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError {
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError {
        code: "IoError".into(),
        message: format!("{}: {e}", path.display()),
    }
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError {
        code: "InvalidInput".into(),
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn catalog(path: Option<&Path>) -> Result<VenueCatalog, CliError> {
    Ok(match path {
        Some(p) => VenueCatalog::load(p)?,
        None => VenueCatalog::sample(),
    })
}

fn workbench(arg: &ConfigArg) -> Result<Workbench, CliError> {
    let path = resolve_config_path(arg.config.clone())?;
    Ok(Workbench::from_config(ServiceConfig::load(path)?)?)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute_command(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error [{}]: {}", e.code, e.message);
            1
        }
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    writeln!(out, "{text}").map_err(|e| io_error(Path::new("<stdout>"), e))
}

fn execute_command(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Serve { config, addr } => {
            let wb = Arc::new(workbench(&config)?);
            let runtime = tokio::runtime::Runtime::new().map_err(|e| io_error(Path::new("<runtime>"), e))?;
            runtime
                .block_on(crate::api::serve(wb, addr))
                .map_err(|e| io_error(Path::new(&addr.to_string()), e))
        }
        Command::Expand {
            map,
            select,
            level,
            k,
            base,
            stopwords,
        } => {
            let mindmap = parse_mindmap(&read(&map)?)?;
            let stopwords = match stopwords {
                Some(p) => StopwordList::parse(&read(&p)?),
                None => StopwordList::parse(DEFAULT_STOPWORDS),
            };
            let response = if k == 0 && select.is_empty() {
                PreviewResponse {
                    neighbourhood_ids: Vec::new(),
                    terms: Vec::new(),
                    query: ExpandedQuery::unexpanded(&base).query_string(),
                }
            } else {
                let hood = compute_neighbourhood(&mindmap, &select, level)?;
                let query = expand_query(&base, &mindmap, &hood, &DocWeights::default(), &stopwords, k)?;
                PreviewResponse {
                    neighbourhood_ids: hood.included_ids.into_iter().collect(),
                    query: query.query_string(),
                    terms: query.expansion_terms,
                }
            };
            write_out(out, &to_json(&response))
        }
        Command::Search {
            config,
            query,
            select,
            level,
            k,
            sources,
            limit,
        } => {
            let wb = workbench(&config)?;
            let summary = wb.search(&SearchRequest {
                base_query: query,
                selected_ids: select,
                level,
                k,
                sources: (!sources.is_empty()).then_some(sources),
                limit,
                ..SearchRequest::default()
            })?;
            let _ = writeln!(err, "query: {}", summary.query);
            for d in &summary.diagnostics {
                let _ = writeln!(err, "{}", to_json(d));
            }
            for record in wb.session(&summary.task_id)?.records {
                write_out(out, &to_json(&record))?;
            }
            Ok(())
        }
        Command::Dedupe {
            input,
            output,
            priority,
            normalize,
            catalog: catalog_path,
        } => {
            let mut records = Vec::new();
            for (n, line) in read(&input)?.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let record: PublicationRecord =
                    serde_json::from_str(line).map_err(|e| invalid(format!("{}:{}: {e}", input.display(), n + 1)))?;
                records.push(record);
            }
            if normalize {
                records = normalize_records(records, &catalog(catalog_path.as_deref())?)?;
            }
            let mut order = priority;
            for r in &records {
                if !order.contains(&r.source_id) {
                    order.push(r.source_id.clone());
                }
            }
            let grouped: Vec<(String, Vec<PublicationRecord>)> = order
                .iter()
                .map(|name| {
                    let rs = records.iter().filter(|r| &r.source_id == name).cloned().collect();
                    (name.clone(), rs)
                })
                .collect();
            let outcome = deduplicate_with(&grouped, Execution::default());
            let _ = writeln!(
                err,
                "{} records, {} removed, {} comparisons",
                outcome.records.len(),
                outcome.removed,
                outcome.comparisons
            );
            let mut text = String::new();
            for r in &outcome.records {
                text.push_str(&to_json(r));
                text.push('\n');
            }
            match output {
                Some(path) => std::fs::write(&path, text).map_err(|e| io_error(&path, e)),
                None => out
                    .write_all(text.as_bytes())
                    .map_err(|e| io_error(Path::new("<stdout>"), e)),
            }
        }
        Command::MatchVenue { venue, catalog: path } => {
            let m = match_venue(&venue, &catalog(path.as_deref())?)?;
            write_out(out, &to_json(&m))
        }
        Command::Scrape {
            wrapper,
            fixtures,
            params,
        } => {
            let config = parse_config(&read(&wrapper)?)?;
            let params: BTreeMap<String, String> = params.into_iter().collect();
            let ctx = execute(&config, &params, &FixtureFetcher::new(fixtures))?;
            let body = json!({ "bindings": ctx.bindings, "requested_urls": ctx.requested_urls });
            write_out(out, &serde_json::to_string_pretty(&body).expect("serializable"))
        }
        Command::FixtureKey { url } => write_out(out, &fixture_key(&url)),
    }
}
