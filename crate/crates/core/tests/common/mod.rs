#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use mindforge_core::cleaning::VenueCatalog;
use mindforge_core::mindmap::{parse_mindmap, Mindmap};
use mindforge_core::orchestrator::{SidecarExtractor, SourceRegistry, WrapperEngine};
use mindforge_core::wrapper::{parse_config, FixtureFetcher, ResultMapping, WrapperSource};

pub fn fixture(rel: &str) -> PathBuf {
    mindforge_testkit::fixtures_dir().join(rel)
}

pub fn web_dir() -> PathBuf {
    fixture("web")
}

pub fn map(name: &str) -> Mindmap {
    let text = std::fs::read_to_string(fixture(&format!("mindmaps/{name}"))).unwrap();
    parse_mindmap(&text).unwrap()
}

pub fn source(name: &str, wrapper: &str, mapping: &[(&str, &str)]) -> WrapperSource {
    let text = std::fs::read_to_string(fixture(&format!("wrappers/{wrapper}"))).unwrap();
    let config = parse_config(&text).unwrap();
    WrapperSource::new(
        name,
        config,
        ResultMapping::from_pairs(mapping.iter().copied()).unwrap(),
    )
    .unwrap()
}

pub fn dblp() -> WrapperSource {
    source(
        "dblp",
        "dblp.xml",
        &[
            ("title", "titles"),
            ("url", "titles@href"),
            ("authors", "authors"),
            ("venue", "venues"),
            ("date", "years"),
        ],
    )
}

pub fn pubmed() -> WrapperSource {
    source(
        "pubmed",
        "pubmed.xml",
        &[
            ("title", "titles"),
            ("url", "titles@href"),
            ("authors", "authors"),
            ("venue", "journals"),
            ("date", "dates"),
            ("abstract", "abstracts"),
        ],
    )
}

pub fn registry() -> SourceRegistry {
    let mut registry = SourceRegistry::new();
    registry.register(1, Arc::new(dblp())).unwrap();
    registry.register(2, Arc::new(pubmed())).unwrap();
    registry
}

pub fn catalog() -> VenueCatalog {
    VenueCatalog::load(fixture("catalog/venues.tsv")).unwrap()
}

pub fn fetcher() -> Arc<FixtureFetcher> {
    Arc::new(FixtureFetcher::new(web_dir()))
}

pub fn web_engine(fetcher: Arc<FixtureFetcher>) -> WrapperEngine {
    let source = source(
        "websearch",
        "websearch.xml",
        &[("title", "links"), ("url", "links@href"), ("snippet", "snippets")],
    );
    WrapperEngine::new(source, fetcher).unwrap()
}

pub fn blog_engine(fetcher: Arc<FixtureFetcher>) -> WrapperEngine {
    let source = source(
        "blogsearch",
        "blogsearch.xml",
        &[("title", "results1"), ("url", "results1@href"), ("snippet", "results2")],
    );
    WrapperEngine::new(source, fetcher).unwrap()
}

pub fn extractor() -> SidecarExtractor {
    SidecarExtractor::new(web_dir())
}
