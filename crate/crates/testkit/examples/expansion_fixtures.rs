//! Prints the exact term ranking behind the two expansion fixtures, showing
//! the margin that separates the chosen terms from the next candidate.
//!
//! cargo run -p mindforge-testkit --example expansion_fixtures

use std::collections::BTreeSet;

use mindforge_core::expansion::{build_documents, compute_neighbourhood, DocWeights};
use mindforge_core::mindmap::parse_mindmap;
use mindforge_core::text::{StopwordList, DEFAULT_STOPWORDS};
use mindforge_testkit::{fixtures_dir, oracle};

const K: usize = 4;

fn show(file: &str, selected: &str, base: &[&str]) {
    let text = std::fs::read_to_string(fixtures_dir().join("mindmaps").join(file)).expect("fixture");
    let map = parse_mindmap(&text).expect("valid map");
    let ids = BTreeSet::from([selected.to_string()]);
    let hood = oracle::neighbourhood(&map.root, &ids, 1);
    let core_hood = compute_neighbourhood(&map, [selected], 1).expect("selection");
    assert_eq!(hood, core_hood.included_ids);

    let docs = build_documents(
        &map,
        &core_hood,
        &DocWeights::default(),
        &StopwordList::parse(DEFAULT_STOPWORDS),
    );
    println!("{file}: selected {selected}, neighbourhood {hood:?}");
    for d in &docs {
        println!("  doc {:<18} weight {:<5} terms {:?}", d.doc_id, d.doc_weight, d.terms);
    }
    // default weights are multiples of 1/4
    let exact: Vec<(Vec<String>, (i128, i128))> = docs
        .iter()
        .map(|d| (d.terms.clone(), ((d.doc_weight * 4.0).round() as i128, 4)))
        .collect();
    let mut ranked: Vec<(String, (i128, i128))> = oracle::term_weights_exact(&exact).into_iter().collect();
    ranked.sort_by(|(ta, a), (tb, b)| (b.0 * a.1).cmp(&(a.0 * b.1)).then(ta.cmp(tb)));
    let mut picked = 0;
    for (term, (n, d)) in &ranked {
        let mark = if base.contains(&term.as_str()) {
            "base"
        } else if picked < K {
            picked += 1;
            "chosen"
        } else {
            ""
        };
        println!("  {term:<14} {n}/{d} = {:.6} {mark}", *n as f64 / *d as f64);
    }
    println!();
}

fn main() {
    show("fig3-clustering.mm", "ID_improve", &[]);
    show("sec6-microrna.mm", "ID_naive_bayes", &["naive", "bayes"]);
}
