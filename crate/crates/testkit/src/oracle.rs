//! Reference implementations written for clarity, not speed.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use mindforge_core::mindmap::MindmapNode;
use mindforge_core::PublicationRecord;

/// Edit distance by memoised recursion on suffixes.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut memo = vec![vec![None; b.len() + 1]; a.len() + 1];
    edit(&a, &b, 0, 0, &mut memo)
}

fn edit(a: &[char], b: &[char], i: usize, j: usize, memo: &mut [Vec<Option<usize>>]) -> usize {
    if let Some(d) = memo[i][j] {
        return d;
    }
    let d = if i == a.len() {
        b.len() - j
    } else if j == b.len() {
        a.len() - i
    } else if a[i] == b[j] {
        edit(a, b, i + 1, j + 1, memo)
    } else {
        1 + edit(a, b, i + 1, j, memo)
            .min(edit(a, b, i, j + 1, memo))
            .min(edit(a, b, i + 1, j + 1, memo))
    };
    memo[i][j] = Some(d);
    d
}

/// Index of the catalog entry minimising distance to acronym plus distance
/// to title, scanning every entry and keeping the first minimum.
pub fn match_venue(s: &str, catalog: &[(String, String)]) -> (usize, usize) {
    let mut best: Option<(usize, usize)> = None;
    for (i, (acronym, title)) in catalog.iter().enumerate() {
        let d = levenshtein(s, acronym) + levenshtein(s, title);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best.expect("non-empty catalog")
}

/// Lowercase, punctuation to spaces, single-space separated.
pub fn canonical(text: &str) -> String {
    let mut out = String::new();
    let mut pending_space = false;
    for c in text.chars() {
        if c.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.extend(c.to_lowercase());
        } else {
            pending_space = true;
        }
    }
    out
}

fn same_publication(a: &PublicationRecord, b: &PublicationRecord) -> bool {
    let venue = |r: &PublicationRecord| match &r.venue_norm {
        Some(v) => v.acronym.clone(),
        None => canonical(&r.venue_raw),
    };
    a.date == b.date && canonical(&a.title) == canonical(&b.title) && venue(a) == venue(b)
}

/// Quadratic dedup: walk every record in (source priority, rank, position)
/// order and keep it unless an already-kept record is the same publication.
pub fn deduplicate(per_source: &[(String, Vec<PublicationRecord>)]) -> Vec<PublicationRecord> {
    let mut all: Vec<(usize, usize, usize, &PublicationRecord)> = Vec::new();
    for (priority, (_, records)) in per_source.iter().enumerate() {
        for (pos, r) in records.iter().enumerate() {
            all.push((priority, r.source_rank, pos, r));
        }
    }
    all.sort_by_key(|&(p, rank, pos, _)| (p, rank, pos));
    let mut kept: Vec<&PublicationRecord> = Vec::new();
    for (_, _, _, r) in all {
        if !kept.iter().any(|k| same_publication(k, r)) {
            kept.push(r);
        }
    }
    kept.into_iter().cloned().collect()
}

/// One scoring document: id, terms, weight.
pub type Doc = (String, Vec<String>, f64);

/// Aggregate term weights computed literally from the definition.
pub fn term_weights(docs: &[Doc]) -> BTreeMap<String, f64> {
    let vocabulary: BTreeSet<&String> = docs.iter().flat_map(|(_, terms, _)| terms).collect();
    let mut out = BTreeMap::new();
    for term in vocabulary {
        let containing: Vec<&Doc> = docs.iter().filter(|(_, terms, _)| terms.contains(term)).collect();
        let doc_freq = containing.len() as f64;
        let mut total = 0.0;
        for (_, terms, weight) in &containing {
            let freq = terms.iter().filter(|t| *t == term).count() as f64;
            total += freq * doc_freq * weight / terms.len() as f64;
        }
        out.insert(term.clone(), total / doc_freq);
    }
    out
}

/// Exact rational term weights for documents with rational weights given as
/// `(numerator, denominator)`. Results are reduced fractions.
pub fn term_weights_exact(docs: &[(Vec<String>, (i128, i128))]) -> BTreeMap<String, (i128, i128)> {
    let vocabulary: BTreeSet<&String> = docs.iter().flat_map(|(terms, _)| terms).collect();
    let mut out = BTreeMap::new();
    for term in vocabulary {
        let containing: Vec<_> = docs.iter().filter(|(terms, _)| terms.contains(term)).collect();
        let doc_freq = containing.len() as i128;
        let mut total = (0i128, 1i128);
        for (terms, (wn, wd)) in containing {
            let freq = terms.iter().filter(|t| *t == term).count() as i128;
            let w = reduce(freq * doc_freq * wn, wd * terms.len() as i128);
            total = reduce(total.0 * w.1 + w.0 * total.1, total.1 * w.1);
        }
        out.insert(term.clone(), reduce(total.0, total.1 * doc_freq));
    }
    out
}

fn reduce(n: i128, d: i128) -> (i128, i128) {
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let g = gcd(n, d).max(1);
    let sign = if d < 0 { -1 } else { 1 };
    (sign * n / g, sign * d / g)
}

/// Ids within tree distance `level` of any selected id. Distances come from
/// ancestor chains meeting at the lowest common ancestor, not a graph search.
pub fn neighbourhood(root: &MindmapNode, selected: &BTreeSet<String>, level: usize) -> BTreeSet<String> {
    let mut parent: HashMap<&str, &str> = HashMap::new();
    let mut ids: Vec<&str> = Vec::new();
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        ids.push(&n.id);
        for c in &n.children {
            parent.insert(&c.id, &n.id);
            stack.push(c);
        }
    }
    let ancestors = |id: &str| -> Vec<String> {
        let mut chain = vec![id.to_string()];
        let mut cur = id;
        while let Some(p) = parent.get(cur) {
            chain.push(p.to_string());
            cur = p;
        }
        chain
    };
    let distance = |u: &str, v: &str| -> usize {
        let au = ancestors(u);
        let av = ancestors(v);
        let (i, j) = au
            .iter()
            .enumerate()
            .find_map(|(i, a)| av.iter().position(|b| b == a).map(|j| (i, j)))
            .expect("common root");
        i + j
    };
    ids.into_iter()
        .filter(|v| selected.iter().any(|s| distance(s, v) <= level))
        .map(str::to_string)
        .collect()
}

/// application/x-www-form-urlencoded encoding of UTF-8 bytes.
pub fn form_encode(value: &str) -> String {
    let mut out = String::new();
    for b in value.bytes() {
        match b {
            b'a'..=b'z' | b'A'..=b'Z' | b'0'..=b'9' | b'*' | b'-' | b'.' | b'_' => out.push(b as char),
            b' ' => out.push('+'),
            _ => out.push_str(&format!("%{b:02X}")),
        }
    }
    out
}

/// Template substitution by scanning characters with an explicit state.
/// Returns `None` when a referenced name is unbound.
pub fn substitute(template: &str, bindings: &BTreeMap<String, String>) -> Option<String> {
    let chars: Vec<char> = template.chars().collect();
    let mut out = String::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '$' && chars.get(i + 1) == Some(&'{') {
            if let Some(close) = chars[i + 2..].iter().position(|&c| c == '}') {
                let name: String = chars[i + 2..i + 2 + close].iter().collect();
                out.push_str(&form_encode(bindings.get(&name)?));
                i += close + 3;
                continue;
            }
            out.extend(&chars[i..]);
            break;
        }
        out.push(chars[i]);
        i += 1;
    }
    Some(out)
}

/// True when `xml` is a well-formed document with a single `html` root.
pub fn reparses_as_html(xml: &str) -> Result<(), String> {
    let doc = roxmltree::Document::parse(xml).map_err(|e| e.to_string())?;
    let root = doc.root_element().tag_name().name();
    if root == "html" {
        Ok(())
    } else {
        Err(format!("root element is {root:?}"))
    }
}
