mod common;

use std::sync::Arc;

use axum::http::{Method, StatusCode};
use common::{call, harness, ok, TARGET};
use mindforge_workbench::service::{ImportRequest, SearchRequest};
use serde_json::json;

#[tokio::test]
async fn full_cycle_against_fixtures() {
    let h = harness("sec6-microrna.mm");
    let report = common::full_cycle(&h).await;
    assert_eq!(
        report.steps,
        ["load", "expand", "search", "dedupe", "facet", "support", "import", "save"]
    );
    assert!(report.fetches > 0);
}

#[tokio::test]
async fn mindmap_endpoint_serves_figure_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = common::scratch_config(&dir, "fig2-microrna.mm");
    let wb = Arc::new(mindforge_workbench::Workbench::from_config(config).unwrap());
    let router = mindforge_workbench::api::router(wb);
    let map = ok(&router, Method::GET, "/api/mindmap", None).await;
    assert_eq!(map["root"]["text"], "microRNA");
    let risc = common::node(&map, "ID_risc").unwrap();
    assert_eq!(risc["kind"], "detail");
    for field in ["id", "text", "kind", "icons", "link", "children"] {
        assert!(risc.get(field).is_some(), "node JSON lacks {field}");
    }
}

#[tokio::test]
async fn unknown_node_is_404() {
    let h = harness("sec6-microrna.mm");
    let (status, body) = call(
        &h.router,
        Method::POST,
        "/api/expansion/preview",
        Some(json!({ "selected_ids": ["ID_nowhere"] })),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["code"], "UnknownNode");
    assert!(body["error"]["message"].as_str().unwrap().contains("ID_nowhere"));

    let (status, body) = call(
        &h.router,
        Method::POST,
        "/api/expansion/preview",
        Some(json!({ "selected_ids": [TARGET], "add_ids": ["ID_gone"] })),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["code"], "UnknownNode");
}

#[tokio::test]
async fn preview_marks_change_the_neighbourhood() {
    let h = harness("sec6-microrna.mm");
    let plain = ok(
        &h.router,
        Method::POST,
        "/api/expansion/preview",
        Some(json!({ "selected_ids": [TARGET] })),
    )
    .await;
    let ids: Vec<&str> = plain["neighbourhood_ids"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(ids.contains(&"ID_nb_detail"));
    assert!(!ids.contains(&"ID_microt"));

    let marked = ok(
        &h.router,
        Method::POST,
        "/api/expansion/preview",
        Some(json!({ "selected_ids": [TARGET], "add_ids": ["ID_microt"], "remove_ids": ["ID_nb_detail"] })),
    )
    .await;
    let ids: Vec<&str> = marked["neighbourhood_ids"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(ids.contains(&"ID_microt"));
    assert!(!ids.contains(&"ID_nb_detail"));

    let none = ok(
        &h.router,
        Method::POST,
        "/api/expansion/preview",
        Some(json!({ "base_query": "Naive Bayes", "selected_ids": [TARGET], "k": 0 })),
    )
    .await;
    assert_eq!(none["query"], "Naive Bayes");
    assert_eq!(none["terms"], json!([]));
}

#[tokio::test]
async fn request_errors_have_stable_codes() {
    let h = harness("sec6-microrna.mm");
    let r = &h.router;

    let (status, body) = call(
        r,
        Method::POST,
        "/api/expansion/preview",
        Some(json!({ "selected": [] })),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "InvalidRequest");

    let (status, body) = call(
        r,
        Method::POST,
        "/api/expansion/preview",
        Some(json!({ "selected_ids": [TARGET], "level": 0 })),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "ZeroLevel");

    let (status, body) = call(r, Method::GET, "/api/search/nope/results", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["code"], "SessionNotFound");

    let (status, body) = call(
        r,
        Method::POST,
        "/api/search",
        Some(json!({ "base_query": "x", "sources": ["acm"] })),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["code"], "UnknownSource");

    let (status, body) = call(
        r,
        Method::POST,
        "/api/search",
        Some(json!({ "base_query": "no fixture for this" })),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_GATEWAY);
    assert_eq!(body["error"]["code"], "AllSourcesFailed");

    let (status, body) = call(r, Method::POST, "/api/search", Some(json!({}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "InvalidRequest");

    let summary = ok(
        r,
        Method::POST,
        "/api/search",
        Some(json!({ "base_query": "Naive Bayes prediction target microrna methods" })),
    )
    .await;
    let task = summary["task_id"].as_str().unwrap();

    let (status, body) = call(
        r,
        Method::GET,
        &format!("/api/search/{task}/results?facet=colour"),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "InvalidFacet");

    let (status, body) = call(
        r,
        Method::POST,
        &format!("/api/search/{task}/support"),
        Some(json!({ "record_index": 99 })),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "RecordIndexOutOfRange");

    let (status, body) = call(
        r,
        Method::POST,
        "/api/import",
        Some(json!({ "task_id": task, "record_indices": [0], "target_node_id": "ID_nowhere" })),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["code"], "UnknownNode");

    let (status, body) = call(r, Method::GET, "/api/nothing", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["code"], "NotFound");
}

#[tokio::test]
async fn support_without_engines_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = common::scratch_config(&dir, "sec6-microrna.mm");
    config.engines = Default::default();
    let wb = Arc::new(mindforge_workbench::Workbench::from_config(config).unwrap());
    let router = mindforge_workbench::api::router(wb);
    let summary = ok(
        &router,
        Method::POST,
        "/api/search",
        Some(json!({ "base_query": "Naive Bayes prediction target microrna methods" })),
    )
    .await;
    let task = summary["task_id"].as_str().unwrap();
    let report = ok(
        &router,
        Method::POST,
        &format!("/api/search/{task}/support"),
        Some(json!({ "record_index": 5 })),
    )
    .await;
    // the pubmed record carries its own abstract
    assert_eq!(report["materials"][0]["kind"], "Abstract");
    let codes: Vec<&str> = report["failures"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["code"].as_str().unwrap())
        .collect();
    assert_eq!(codes, ["EngineNotConfigured"; 3]);
}

#[tokio::test]
async fn put_replaces_and_validates_the_map() {
    let h = harness("sec6-microrna.mm");
    let r = &h.router;
    let mut map = ok(r, Method::GET, "/api/mindmap", None).await;
    map["root"]["text"] = json!("renamed");
    let (status, _) = call(r, Method::PUT, "/api/mindmap", Some(map.clone())).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    assert_eq!(
        ok(r, Method::GET, "/api/mindmap", None).await["root"]["text"],
        "renamed"
    );

    let mut dup = map.clone();
    dup["root"]["children"][0]["id"] = dup["root"]["id"].clone();
    let (status, body) = call(r, Method::PUT, "/api/mindmap", Some(dup)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "DuplicateId");
    assert_eq!(ok(r, Method::GET, "/api/mindmap", None).await, map);

    let saved = ok(r, Method::POST, "/api/mindmap/save", None).await;
    assert_eq!(saved["path"], json!(h.dir.path().join("sec6-microrna.mm")));
    let text = std::fs::read_to_string(h.dir.path().join("sec6-microrna.mm")).unwrap();
    assert!(text.contains("TEXT=\"renamed\""));
    let leftovers = std::fs::read_dir(h.dir.path()).unwrap().count();
    assert_eq!(leftovers, 1, "temporary file left behind");
}

#[tokio::test]
async fn catalog_and_sources() {
    let h = harness("sec6-microrna.mm");
    let venues = ok(&h.router, Method::GET, "/api/catalog/venues", None).await;
    let venues = venues.as_array().unwrap();
    assert_eq!(venues.len(), 22);
    assert!(venues.iter().any(|v| v["acronym"] == "VLDB"));
    let sources = ok(&h.router, Method::GET, "/api/sources", None).await;
    assert_eq!(
        sources,
        json!({
            "sources": [{ "name": "dblp", "priority": 1 }, { "name": "pubmed", "priority": 2 }],
            "engines": { "blog": "blogsearch", "horizontal": "websearch" }
        })
    );
}

#[test]
fn readers_never_see_a_partial_import() {
    let h = harness("sec6-microrna.mm");
    let wb = Arc::clone(&h.workbench);
    let summary = wb
        .search(&SearchRequest {
            base_query: "Naive Bayes prediction target microrna methods".into(),
            ..Default::default()
        })
        .unwrap();
    let before = wb.mindmap().node(TARGET).unwrap().children.len();
    let all: Vec<usize> = (0..summary.record_count).collect();

    std::thread::scope(|s| {
        let reader = s.spawn(|| {
            let mut seen = std::collections::BTreeSet::new();
            for _ in 0..2000 {
                seen.insert(wb.mindmap().node(TARGET).unwrap().children.len());
            }
            seen
        });
        wb.import(&ImportRequest {
            task_id: summary.task_id.clone(),
            record_indices: all.clone(),
            target_node_id: TARGET.into(),
        })
        .unwrap();
        let seen = reader.join().unwrap();
        assert!(seen.iter().all(|&n| n == before || n == before + all.len()), "{seen:?}");
    });
}

#[test]
fn task_ids_are_unique() {
    let h = harness("sec6-microrna.mm");
    let req = SearchRequest {
        base_query: "Naive Bayes prediction target microrna methods".into(),
        ..Default::default()
    };
    let a = h.workbench.search(&req).unwrap();
    let b = h.workbench.search(&req).unwrap();
    assert_ne!(a.task_id, b.task_id);
    assert_eq!(
        h.workbench.session(&a.task_id).unwrap().records,
        h.workbench.session(&b.task_id).unwrap().records
    );
}
