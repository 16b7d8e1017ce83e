//! Prints every step of query expansion for a map and a selection.
//!
//! This is how the expansion fixtures were built: the trace shows each
//! document, its weight and size, and every term's per-document and
//! aggregate score, so the top-K cut can be checked by hand.
//!
//! ```text
//! cargo run --example expansion_trace -- fixtures/mindmaps/fig3-clustering.mm ID_improve
//! cargo run --example expansion_trace -- fixtures/mindmaps/sec6-microrna.mm ID_naive_bayes "Naive Bayes"
//! ```

use std::env;
use std::process::ExitCode;

use mindforge_core::expansion::{
    build_documents, compute_neighbourhood, expand_query, score_terms, DocWeights, DEFAULT_K, DEFAULT_LEVEL,
};
use mindforge_core::mindmap::parse_mindmap;
use mindforge_core::text::StopwordList;

fn main() -> ExitCode {
    let args: Vec<String> = env::args().skip(1).collect();
    let (path, selected, base) = match args.as_slice() {
        [p, s] => (p, s, ""),
        [p, s, b] => (p, s, b.as_str()),
        _ => {
            eprintln!("usage: expansion_trace <map.mm> <node-id> [base query]");
            return ExitCode::from(2);
        }
    };
    let xml = match std::fs::read_to_string(path) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("{path}: {e}");
            return ExitCode::FAILURE;
        }
    };
    let map = match parse_mindmap(&xml) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("{path}: {e}");
            return ExitCode::FAILURE;
        }
    };
    let weights = DocWeights::default();
    let stopwords = StopwordList::default();
    let hood = match compute_neighbourhood(&map, [selected], DEFAULT_LEVEL) {
        Ok(n) => n,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::FAILURE;
        }
    };

    println!("neighbourhood (level {DEFAULT_LEVEL}) of {selected}:");
    for id in &hood.included_ids {
        let node = map.node(id).expect("included ids exist");
        println!("  {id:<16} {:<14} {:?}", node.kind.name(), node.text);
    }

    let docs = build_documents(&map, &hood, &weights, &stopwords);
    println!("\ndocuments:");
    for d in &docs {
        println!(
            "  {:<16} weight {:<5} size {:<3} {:?}",
            d.doc_id, d.doc_weight, d.doc_size, d.terms
        );
    }

    let scores = score_terms(&docs).expect("non-empty corpus");
    println!("\nscores (W = mean over containing documents of freq * docFreq * weight / size):");
    for s in &scores {
        let parts: Vec<String> = s.per_doc.iter().map(|(doc, w)| format!("{doc}={w:.4}")).collect();
        println!(
            "  {:<20} W={:.4} docFreq={} [{}]",
            s.term,
            s.aggregate,
            s.doc_freq,
            parts.join(", ")
        );
    }

    let query = expand_query(base, &map, &hood, &weights, &stopwords, DEFAULT_K).expect("expansion");
    println!("\nbase: {:?}", query.base_terms);
    println!(
        "top-{DEFAULT_K} expansion: {:?}",
        query.expansion_terms.iter().map(|t| &t.term).collect::<Vec<_>>()
    );
    println!("query: {}", query.query_string());
    ExitCode::SUCCESS
}
