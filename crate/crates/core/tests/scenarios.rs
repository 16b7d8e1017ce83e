mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use mindforge_core::cleaning::{levenshtein, match_venue, VenueCatalog};
use mindforge_core::dedup::{deduplicate_with, DateKey};
use mindforge_core::expansion::{
    compute_neighbourhood, expand_query, DocWeights, ExpandedQuery, DEFAULT_K, DEFAULT_LEVEL,
};
use mindforge_core::orchestrator::{
    collect_support, find_blog_posts, find_document, find_slides, vertical_search, MaterialKind, SearchTask,
    SupportEngines, DEFAULT_MIN_SECTIONS,
};
use mindforge_core::organizer::{build_mm_subtree, group_results, import_results, FacetSpec, IdSource};
use mindforge_core::text::{StopwordList, DEFAULT_STOPWORDS};
use mindforge_core::wrapper::{execute, parse_config, Fetcher, FixtureFetcher};
use mindforge_core::{ErrorCode, Execution, PublicationRecord};

const EXPANDED: &str = "Naive Bayes prediction target microrna methods";

fn stopwords() -> StopwordList {
    StopwordList::parse(DEFAULT_STOPWORDS)
}

fn flagged(map: &mindforge_core::mindmap::Mindmap, icon: &str) -> BTreeSet<String> {
    map.nodes()
        .filter(|n| n.icons.iter().any(|i| i == icon))
        .map(|n| n.id.clone())
        .collect()
}

fn expanded(base: &str, map_name: &str, selected: &str) -> ExpandedQuery {
    let map = common::map(map_name);
    let hood = compute_neighbourhood(&map, [selected], DEFAULT_LEVEL).unwrap();
    expand_query(base, &map, &hood, &DocWeights::default(), &stopwords(), DEFAULT_K).unwrap()
}

#[test]
fn clustering_neighbourhood_is_the_flagged_nodes() {
    let map = common::map("fig3-clustering.mm");
    let selected = flagged(&map, "flag-blue");
    assert_eq!(selected, BTreeSet::from(["ID_improve".to_string()]));
    let hood = compute_neighbourhood(&map, &selected, DEFAULT_LEVEL).unwrap();
    let mut expected = flagged(&map, "flag-green");
    expected.extend(selected);
    assert_eq!(hood.included_ids, expected);
}

#[test]
fn clustering_expansion_terms() {
    let query = expanded("", "fig3-clustering.mm", "ID_improve");
    let terms: BTreeSet<&str> = query.expansion_terms.iter().map(|t| t.term.as_str()).collect();
    assert_eq!(
        terms,
        BTreeSet::from(["clustering", "improve", "rank-based", "similarity"])
    );
}

#[test]
fn naive_bayes_query_terms() {
    let query = expanded("Naive Bayes", "sec6-microrna.mm", "ID_naive_bayes");
    let terms: BTreeSet<String> = query.query_string().split_whitespace().map(str::to_lowercase).collect();
    let expected: BTreeSet<String> = ["methods", "naive", "bayes", "target", "microrna", "prediction"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    assert_eq!(terms, expected);
    assert_eq!(query.query_string(), EXPANDED);
}

#[test]
fn venue_examples() {
    assert_eq!(levenshtein("VLDD", "VLDB Conf"), 6);
    let catalog = VenueCatalog::sample();
    for raw in ["Very Large Database Conf", "VLDB Conf"] {
        assert_eq!(match_venue(raw, &catalog).unwrap().acronym, "VLDB", "{raw}");
    }
    let fixture = common::catalog();
    for (raw, acronym) in [
        ("Nucleic Acids Research", "NAR"),
        ("Nucleic Acids Res", "NAR"),
        ("PLoS Computational Biology", "PLOSCB"),
        ("PLoS Comput Biol", "PLOSCB"),
        ("Research in Computational Molecular Biology", "RECOMB"),
        ("Proceedings of the National Academy of Sciences", "PNAS"),
    ] {
        assert_eq!(match_venue(raw, &fixture).unwrap().acronym, acronym, "{raw}");
    }
}

#[test]
fn blog_listing_binds_result_anchors() {
    let text = std::fs::read_to_string(common::fixture("wrappers/blogsearch.xml")).unwrap();
    let config = parse_config(&text).unwrap();
    let fetcher = FixtureFetcher::new(common::web_dir());
    let params = BTreeMap::from([("searchQuery".to_string(), "ubuntu".to_string())]);
    let ctx = execute(&config, &params, &fetcher).unwrap();
    let anchors = ctx.get("results1").unwrap().as_nodes().unwrap();
    let ids: Vec<&str> = anchors.iter().map(|n| n.attr("id").unwrap()).collect();
    assert_eq!(ids, ["p-1", "p-2"]);
    let cells = ctx.get("results2").unwrap().as_nodes().unwrap();
    assert_eq!(cells.len(), 1);
    assert_eq!(cells.get(0).unwrap().attr("class"), Some("j"));
    assert_eq!(fetcher.calls().len(), 1);
}

#[test]
fn fixture_fetcher_refuses_unknown_urls() {
    let fetcher = FixtureFetcher::new(common::web_dir());
    let err = fetcher.fetch("http://unlisted.example.org/").unwrap_err();
    assert_eq!(err.url, "http://unlisted.example.org/");
}

fn search(
    query: &str,
) -> Result<mindforge_core::orchestrator::VerticalOutcome, mindforge_core::orchestrator::OrchestratorError> {
    let task = SearchTask::new(
        ExpandedQuery::unexpanded(query),
        vec!["pubmed".into(), "dblp".into()],
        30,
    );
    vertical_search(&task, &common::registry(), &common::catalog(), common::fetcher())
}

#[test]
fn vertical_search_merges_by_priority() {
    let outcome = search(EXPANDED).unwrap();
    let got: Vec<(&str, &str, Option<i32>)> = outcome
        .records
        .iter()
        .map(|r| {
            (
                r.source_id.as_str(),
                r.venue_norm.as_ref().unwrap().acronym.as_str(),
                r.date,
            )
        })
        .collect();
    assert_eq!(
        got,
        [
            ("dblp", "NAR", Some(2007)),
            ("dblp", "RECOMB", Some(2006)),
            ("dblp", "PLOSCB", Some(2008)),
            ("dblp", "ISMB", Some(2009)),
            ("dblp", "PNAS", Some(2005)),
            ("pubmed", "RNA", Some(2008)),
            ("pubmed", "NAR", Some(2009)),
            ("pubmed", "TCBB", Some(2010)),
        ]
    );
    assert_eq!(outcome.duplicates_removed, 2);
    assert_eq!(
        outcome
            .diagnostics
            .iter()
            .map(|d| d.source.as_str())
            .collect::<Vec<_>>(),
        ["dblp", "pubmed"]
    );
    let first = &outcome.records[0];
    assert_eq!(first.title, "Naive Bayes classifiers for microRNA target prediction");
    assert_eq!(first.authors, ["E. Petrou", "K. Nikolaou"]);
    assert_eq!(
        first.url.as_deref(),
        Some("http://dblp.example.org/rec/journals/nar/PetrouN07")
    );
    assert_eq!(
        outcome.records[5].r#abstract.as_deref(),
        Some("Seed matches are scored by their conservation across twelve genomes.")
    );
}

#[test]
fn comparisons_stay_inside_year_blocks() {
    let registry = common::registry();
    let fetcher = common::fetcher();
    let catalog = common::catalog();
    let per_source: Vec<(String, Vec<PublicationRecord>)> = registry
        .iter()
        .map(|entry| {
            let records = entry.source.search(EXPANDED, 30, &*fetcher).unwrap();
            let records = mindforge_core::cleaning::normalize_records(records, &catalog).unwrap();
            (entry.source.name().to_string(), records)
        })
        .collect();
    let outcome = deduplicate_with(&per_source, Execution::Sequential);
    // dblp has one record in each of 2007, 2008 and 2009; pubmed one in 2007,
    // two in 2008 and one in 2009; 2005, 2006 and 2010 hold a single source
    assert_eq!(outcome.comparisons_by_key[&DateKey::Year(2007)], 1);
    assert_eq!(outcome.comparisons_by_key[&DateKey::Year(2008)], 2);
    assert_eq!(outcome.comparisons_by_key[&DateKey::Year(2009)], 1);
    for year in [2005, 2006, 2010] {
        assert_eq!(
            outcome
                .comparisons_by_key
                .get(&DateKey::Year(year))
                .copied()
                .unwrap_or(0),
            0
        );
    }
    assert_eq!(outcome.comparisons, 4);
}

#[test]
fn empty_page_is_an_empty_result() {
    let task = SearchTask::new(ExpandedQuery::unexpanded("zzzz"), vec!["dblp".into()], 10);
    let outcome = vertical_search(&task, &common::registry(), &common::catalog(), common::fetcher()).unwrap();
    assert!(outcome.records.is_empty());
}

#[test]
fn unreachable_sources_fail_the_search() {
    let err = search("no fixture for this").unwrap_err();
    assert_eq!(err.code(), "AllSourcesFailed");
}

fn dblp_record(index: usize) -> PublicationRecord {
    search(EXPANDED).unwrap().records[index].clone()
}

#[test]
fn document_search_verifies_by_title() {
    let engine = common::web_engine(common::fetcher());
    let extractor = common::extractor();

    let doc = find_document(&dblp_record(0), &engine, &extractor).unwrap();
    assert_eq!(doc.url.as_deref(), Some("http://papers.example.org/petrou07.pdf"));
    assert!(doc.verified);
    assert_eq!(doc.evidence, "title-substring");

    let doc = find_document(&dblp_record(2), &engine, &extractor).unwrap();
    assert_eq!(doc.url.as_deref(), Some("http://papers.example.org/brandt08.doc"));
    assert!(doc.verified);

    let doc = find_document(&dblp_record(1), &engine, &extractor).unwrap();
    assert_eq!(doc.url.as_deref(), Some("http://lecture.example.org/probmodels.pdf"));
    assert!(!doc.verified);

    let err = find_document(&dblp_record(3), &engine, &extractor).unwrap_err();
    assert_eq!(err.code(), "NoCandidates");
}

#[test]
fn slides_verify_by_outline_or_sections() {
    let engine = common::web_engine(common::fetcher());
    let extractor = common::extractor();
    let slides = find_slides(&dblp_record(0), &engine, &extractor, &[], DEFAULT_MIN_SECTIONS).unwrap();
    assert_eq!(
        slides.url.as_deref(),
        Some("http://lab.example.org/talks/petrou-nb.ppt")
    );
    assert_eq!((slides.verified, slides.evidence.as_str()), (true, "outline"));

    let sections: Vec<String> = ["Introduction", "Benchmark Data", "Results"].map(String::from).to_vec();
    let slides = find_slides(&dblp_record(2), &engine, &extractor, &sections, 2).unwrap();
    assert_eq!((slides.verified, slides.evidence.as_str()), (true, "sections:2/3"));
    let slides = find_slides(&dblp_record(2), &engine, &extractor, &sections, 3).unwrap();
    assert!(!slides.verified);
}

#[test]
fn blog_posts_use_title_and_first_author() {
    let fetcher = common::fetcher();
    let engine = common::blog_engine(Arc::clone(&fetcher));
    let posts = find_blog_posts(&dblp_record(0), &engine).unwrap();
    assert_eq!(posts.len(), 2);
    assert!(posts
        .iter()
        .all(|p| !p.verified && p.evidence == "unverified:no-heuristic"));
    assert_eq!(
        posts[0].title.as_deref(),
        Some("Reading group: naive Bayes for microRNA targets")
    );
    let url = fetcher.calls().pop().unwrap();
    assert!(
        url.contains("q=naive+bayes+classifiers+for+microrna+target+prediction+petrou&"),
        "{url}"
    );
}

#[test]
fn support_collects_every_kind() {
    let fetcher = common::fetcher();
    let docs = common::web_engine(Arc::clone(&fetcher));
    let blogs = common::blog_engine(fetcher);
    let extractor = common::extractor();
    let engines = SupportEngines {
        documents: Some(&docs),
        blogs: Some(&blogs),
        extractor: &extractor,
        min_sections: DEFAULT_MIN_SECTIONS,
    };
    let kinds = [
        MaterialKind::Document,
        MaterialKind::Abstract,
        MaterialKind::Slides,
        MaterialKind::BlogPost,
    ];

    let report = collect_support(&dblp_record(2), &kinds, &engines);
    let summary: Vec<(MaterialKind, bool, &str)> = report
        .materials
        .iter()
        .map(|m| (m.kind, m.verified, m.evidence.as_str()))
        .collect();
    assert_eq!(
        summary,
        [
            (MaterialKind::Document, true, "title-substring"),
            (MaterialKind::Abstract, false, "document:abstract-heading"),
            (MaterialKind::Slides, true, "sections:2/3"),
        ]
    );
    assert_eq!(
        report.materials[1].text.as_deref(),
        Some("Seven programs are compared on supported targets.")
    );
    assert_eq!(report.failures.len(), 1);
    assert_eq!(report.failures[0].kind, MaterialKind::BlogPost);
}

#[test]
fn facets_and_import_under_naive_bayes() {
    let records = search(EXPANDED).unwrap().records;
    let by_year = group_results(&records, &FacetSpec::Date).unwrap();
    let sizes: Vec<(&str, usize)> = by_year.iter().map(|g| (g.label.as_str(), g.records.len())).collect();
    assert_eq!(
        sizes,
        [
            ("2005", 1),
            ("2006", 1),
            ("2007", 1),
            ("2008", 2),
            ("2009", 2),
            ("2010", 1)
        ]
    );
    let by_forum = group_results(&records, &FacetSpec::Forum).unwrap();
    assert_eq!(by_forum.iter().find(|g| g.label == "NAR").unwrap().records.len(), 2);

    let engine = common::web_engine(common::fetcher());
    let extractor = common::extractor();
    let paper = &records[0];
    let doc = find_document(paper, &engine, &extractor).unwrap();
    let slides = find_slides(paper, &engine, &extractor, &[], DEFAULT_MIN_SECTIONS).unwrap();
    let mut ids = IdSource::sequential("ID_import_");
    let subtrees = vec![
        build_mm_subtree(paper, &[doc, slides], &mut ids),
        build_mm_subtree(&records[2], &[], &mut ids),
    ];

    let map = common::map("sec6-microrna.mm");
    let before = map.node("ID_naive_bayes").unwrap().children.len();
    let updated = import_results(&map, "ID_naive_bayes", subtrees.clone()).unwrap();
    let target = updated.node("ID_naive_bayes").unwrap();
    assert_eq!(target.children.len(), before + 2);
    let imported = &target.children[before];
    assert_eq!(imported.text, paper.title);
    let child_texts: Vec<&str> = imported.children.iter().map(|c| c.text.as_str()).collect();
    assert_eq!(
        child_texts,
        [
            "http://dblp.example.org/rec/journals/nar/PetrouN07",
            "Document",
            "Slides"
        ]
    );
    assert_eq!(
        imported.children[2].link.as_deref(),
        Some("http://lab.example.org/talks/petrou-nb.ppt")
    );

    let again = import_results(&updated, "ID_naive_bayes", subtrees).unwrap();
    assert_eq!(again, updated);
}
