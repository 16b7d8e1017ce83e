#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use mindforge_core::expansion::{build_documents, compute_neighbourhood, DocWeights};
use mindforge_core::mindmap::{parse_mindmap, Mindmap};
use mindforge_core::organizer::IdSource;
use mindforge_core::text::{StopwordList, DEFAULT_STOPWORDS};
use mindforge_core::wrapper::FixtureFetcher;
use mindforge_testkit::oracle;
use mindforge_workbench::{ServiceConfig, Workbench};
use serde_json::{json, Value};
use tempfile::TempDir;
use tower::ServiceExt;

pub const TARGET: &str = "ID_naive_bayes";
pub const BASE: &str = "Naive Bayes";

pub fn fixture(rel: &str) -> PathBuf {
    mindforge_testkit::fixtures_dir().join(rel)
}

pub fn config_path() -> PathBuf {
    fixture("workbench.toml")
}

/// The fixture config with its map copied into a scratch directory, so
/// saves never touch the repository.
pub fn scratch_config(dir: &TempDir, map: &str) -> ServiceConfig {
    let mut config = ServiceConfig::load(config_path()).unwrap();
    let path = dir.path().join(map);
    std::fs::copy(fixture(&format!("mindmaps/{map}")), &path).unwrap();
    config.mindmap_path = path;
    config
}

pub struct Harness {
    pub dir: TempDir,
    pub fetcher: Arc<FixtureFetcher>,
    pub workbench: Arc<Workbench>,
    pub router: Router,
}

pub fn harness(map: &str) -> Harness {
    let dir = tempfile::tempdir().unwrap();
    let config = scratch_config(&dir, map);
    let fetcher = Arc::new(FixtureFetcher::new(fixture("web")));
    let workbench = Workbench::with_fetcher(config, fetcher.clone(), Some(fixture("web")))
        .unwrap()
        .with_id_source(IdSource::sequential("ID_import_"));
    let workbench = Arc::new(workbench);
    let router = mindforge_workbench::api::router(Arc::clone(&workbench));
    Harness {
        dir,
        fetcher,
        workbench,
        router,
    }
}

pub async fn call(router: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let request = Request::builder().method(method).uri(uri);
    let request = match body {
        Some(body) => request
            .header("content-type", "application/json")
            .body(Body::from(body.to_string())),
        None => request.body(Body::empty()),
    }
    .unwrap();
    let response = router.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&bytes)))
    };
    (status, value)
}

pub async fn ok(router: &Router, method: Method, uri: &str, body: Option<Value>) -> Value {
    let (status, value) = call(router, method, uri, body).await;
    assert!(status.is_success(), "{uri}: {status} {value}");
    value
}

/// URLs with a saved page; anything else would have needed the network.
pub fn listed_urls() -> BTreeSet<String> {
    std::fs::read_to_string(fixture("web/URLS.tsv"))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split('\t').nth(1).unwrap().to_string())
        .collect()
}

pub fn node<'a>(map: &'a Value, id: &str) -> Option<&'a Value> {
    fn walk<'a>(n: &'a Value, id: &str) -> Option<&'a Value> {
        if n["id"] == id {
            return Some(n);
        }
        n["children"].as_array()?.iter().find_map(|c| walk(c, id))
    }
    walk(&map["root"], id)
}

fn texts(node: &Value) -> Vec<String> {
    node["children"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["text"].as_str().unwrap().to_string())
        .collect()
}

pub const EXPECTED_RECORDS: [(&str, &str, i64); 8] = [
    ("dblp", "NAR", 2007),
    ("dblp", "RECOMB", 2006),
    ("dblp", "PLOSCB", 2008),
    ("dblp", "ISMB", 2009),
    ("dblp", "PNAS", 2005),
    ("pubmed", "RNA", 2008),
    ("pubmed", "NAR", 2009),
    ("pubmed", "TCBB", 2010),
];

#[derive(Debug, Default)]
pub struct CycleReport {
    pub steps: Vec<&'static str>,
    pub fetches: usize,
}

/// Expand, search, facet, gather support, import and save against the
/// fixture service, checking every response. Panics on the first mismatch.
pub async fn full_cycle(h: &Harness) -> CycleReport {
    let r = &h.router;
    let mut report = CycleReport::default();

    let map = ok(r, Method::GET, "/api/mindmap", None).await;
    let before = node(&map, TARGET).expect("target node")["children"]
        .as_array()
        .unwrap()
        .len();
    report.steps.push("load");

    // expansion: neighbourhood by tree distance, weights by the formula
    let preview = ok(
        r,
        Method::POST,
        "/api/expansion/preview",
        Some(json!({ "base_query": BASE, "selected_ids": [TARGET], "level": 1, "k": 4 })),
    )
    .await;
    let parsed: Mindmap =
        parse_mindmap(&std::fs::read_to_string(fixture("mindmaps/sec6-microrna.mm")).unwrap()).unwrap();
    let selected = BTreeSet::from([TARGET.to_string()]);
    let hood: Vec<String> = oracle::neighbourhood(&parsed.root, &selected, 1).into_iter().collect();
    assert_eq!(preview["neighbourhood_ids"], json!(hood));
    let docs = build_documents(
        &parsed,
        &compute_neighbourhood(&parsed, [TARGET], 1).unwrap(),
        &DocWeights::default(),
        &StopwordList::parse(DEFAULT_STOPWORDS),
    );
    let docs: Vec<oracle::Doc> = docs.into_iter().map(|d| (d.doc_id, d.terms, d.doc_weight)).collect();
    let weights = oracle::term_weights(&docs);
    let terms = preview["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 4);
    for t in terms {
        let term = t["term"].as_str().unwrap();
        let score = t["score"].as_f64().unwrap();
        assert!(
            (score - weights[term]).abs() <= 1e-12,
            "{term}: {score} vs {}",
            weights[term]
        );
        assert!(!["naive", "bayes"].contains(&term));
    }
    let query_terms: BTreeSet<&str> = preview["query"].as_str().unwrap().split(' ').collect();
    assert_eq!(
        query_terms,
        BTreeSet::from(["methods", "Naive", "Bayes", "target", "microrna", "prediction"])
    );
    report.steps.push("expand");

    // search and dedupe
    let summary = ok(
        r,
        Method::POST,
        "/api/search",
        Some(json!({ "base_query": BASE, "selected_ids": [TARGET], "level": 1, "k": 4, "sources": ["dblp", "pubmed"], "limit": 30 })),
    )
    .await;
    assert_eq!(summary["query"], "Naive Bayes prediction target microrna methods");
    assert_eq!(summary["record_count"], 8);
    assert_eq!(summary["duplicates_removed"], 2);
    let task = summary["task_id"].as_str().unwrap().to_string();
    report.steps.push("search");

    let results = ok(r, Method::GET, &format!("/api/search/{task}/results"), None).await;
    let records = results["records"].as_array().unwrap();
    let got: Vec<(&str, &str, i64)> = records
        .iter()
        .map(|x| {
            (
                x["source_id"].as_str().unwrap(),
                x["venue_norm"]["acronym"].as_str().unwrap(),
                x["date"].as_i64().unwrap(),
            )
        })
        .collect();
    assert_eq!(got, EXPECTED_RECORDS);
    for (i, a) in records.iter().enumerate() {
        for b in &records[i + 1..] {
            let same = a["date"] == b["date"]
                && oracle::canonical(a["title"].as_str().unwrap()) == oracle::canonical(b["title"].as_str().unwrap())
                && a["venue_norm"] == b["venue_norm"];
            assert!(!same, "duplicate left: {a} / {b}");
        }
    }
    report.steps.push("dedupe");

    // facets
    let faceted = ok(r, Method::GET, &format!("/api/search/{task}/results?facet=date"), None).await;
    let mut sizes = BTreeMap::new();
    for g in faceted["groups"].as_array().unwrap() {
        let label = g["label"].as_str().unwrap();
        let indices = g["indices"].as_array().unwrap();
        for i in indices {
            let year = records[i.as_u64().unwrap() as usize]["date"].as_i64().unwrap();
            assert_eq!(year.to_string(), label);
        }
        sizes.insert(label.to_string(), indices.len());
    }
    let expected: BTreeMap<String, usize> = [
        ("2005", 1),
        ("2006", 1),
        ("2007", 1),
        ("2008", 2),
        ("2009", 2),
        ("2010", 1),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    assert_eq!(sizes, expected);
    let forums = ok(r, Method::GET, &format!("/api/search/{task}/results?facet=forum"), None).await;
    let nar = forums["groups"]
        .as_array()
        .unwrap()
        .iter()
        .find(|g| g["label"] == "NAR")
        .unwrap();
    assert_eq!(nar["indices"], json!([0, 6]));
    report.steps.push("facet");

    // support: verified document and outline slides for the first record
    let support = ok(
        r,
        Method::POST,
        &format!("/api/search/{task}/support"),
        Some(json!({ "record_index": 0, "kinds": ["Document", "Slides"] })),
    )
    .await;
    let materials = support["materials"].as_array().unwrap();
    assert_eq!(materials.len(), 2, "{support}");
    assert_eq!(materials[0]["kind"], "Document");
    assert_eq!(materials[0]["url"], "http://papers.example.org/petrou07.pdf");
    assert_eq!(materials[0]["verified"], true);
    assert_eq!(materials[0]["evidence"], "title-substring");
    assert_eq!(materials[1]["kind"], "Slides");
    assert_eq!(materials[1]["url"], "http://lab.example.org/talks/petrou-nb.ppt");
    assert_eq!(materials[1]["verified"], true);
    assert_eq!(materials[1]["evidence"], "outline");
    assert_eq!(support["failures"], json!([]));

    let support = ok(
        r,
        Method::POST,
        &format!("/api/search/{task}/support"),
        Some(json!({ "record_index": 2, "kinds": ["Document"] })),
    )
    .await;
    assert_eq!(support["materials"][0]["url"], "http://papers.example.org/brandt08.doc");
    assert_eq!(support["materials"][0]["verified"], true);
    let stored = ok(r, Method::GET, &format!("/api/search/{task}/results"), None).await;
    assert_eq!(stored["support"]["0"].as_array().unwrap().len(), 2);
    assert_eq!(stored["support"]["2"].as_array().unwrap().len(), 1);
    report.steps.push("support");

    // import
    let import = json!({ "task_id": task, "record_indices": [0, 2], "target_node_id": TARGET });
    let imported = ok(r, Method::POST, "/api/import", Some(import.clone())).await;
    assert_eq!(imported["imported"], 2);
    assert_eq!(imported["skipped"], 0);
    let roots: Vec<String> = imported["node_ids"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert_eq!(roots.len(), 2);

    let map = ok(r, Method::GET, "/api/mindmap", None).await;
    let target = node(&map, TARGET).unwrap();
    let children = target["children"].as_array().unwrap();
    assert_eq!(children.len(), before + 2);
    let first = &children[before];
    assert_eq!(first["id"], roots[0].as_str());
    assert_eq!(first["text"], records[0]["title"]);
    assert_eq!(first["kind"], "topic");
    assert_eq!(
        texts(first),
        [
            "http://dblp.example.org/rec/journals/nar/PetrouN07",
            "Document",
            "Slides"
        ]
    );
    assert_eq!(first["children"][1]["link"], "http://papers.example.org/petrou07.pdf");
    assert_eq!(
        first["children"][2]["link"],
        "http://lab.example.org/talks/petrou-nb.ppt"
    );
    let second = &children[before + 1];
    assert_eq!(second["text"], records[2]["title"]);
    assert_eq!(texts(second)[1], "Document");
    assert_eq!(second["children"][1]["link"], "http://papers.example.org/brandt08.doc");

    let again = ok(r, Method::POST, "/api/import", Some(import)).await;
    assert_eq!(
        (again["imported"].as_u64(), again["skipped"].as_u64()),
        (Some(0), Some(2))
    );
    assert_eq!(ok(r, Method::GET, "/api/mindmap", None).await, map);
    report.steps.push("import");

    // save, then a fresh service over the same file shows the same map
    let saved = ok(r, Method::POST, "/api/mindmap/save", None).await;
    let path = PathBuf::from(saved["path"].as_str().unwrap());
    let on_disk = parse_mindmap(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(serde_json::to_value(&on_disk).unwrap(), map);
    let mut config = ServiceConfig::load(config_path()).unwrap();
    config.mindmap_path = path;
    let restarted = Workbench::with_fetcher(config, h.fetcher.clone(), None).unwrap();
    assert_eq!(serde_json::to_value(restarted.mindmap()).unwrap(), map);
    report.steps.push("save");

    let listed = listed_urls();
    let calls = h.fetcher.calls();
    for url in &calls {
        assert!(listed.contains(url), "unlisted fetch {url}");
    }
    report.fetches = calls.len();
    report
}
