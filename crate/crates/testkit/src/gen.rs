//! Seeded random instance generators.

use mindforge_core::mindmap::{ElementKind, Mindmap, MindmapNode};
use mindforge_core::{PublicationRecord, VenueRef};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::oracle::Doc;

const LOWER: &str = "abcdefghijklmnopqrstuvwxyz";
const MIXED: &str = "abcdeABCDE xyz-.,'&<>\"éßİ中ﬁ\t0123";

pub fn string_from(rng: &mut impl Rng, alphabet: &str, max_len: usize) -> String {
    let chars: Vec<char> = alphabet.chars().collect();
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| *chars.choose(rng).expect("alphabet")).collect()
}

/// A short string over a small alphabet (so edits collide often) or over a
/// mixed alphabet with multi-byte characters.
pub fn edit_string(rng: &mut impl Rng, max_len: usize) -> String {
    if rng.gen_bool(0.5) {
        string_from(rng, "abc", max_len)
    } else {
        string_from(rng, MIXED, max_len)
    }
}

fn word(rng: &mut impl Rng, min: usize, max: usize) -> String {
    let len = rng.gen_range(min..=max);
    let chars: Vec<char> = LOWER.chars().collect();
    (0..len).map(|_| *chars.choose(rng).expect("letters")).collect()
}

/// Perturb a string by a few random character edits.
pub fn perturb(rng: &mut impl Rng, s: &str, edits: usize) -> String {
    let mut chars: Vec<char> = s.chars().collect();
    let pool: Vec<char> = "abcxyzVLDB .-".chars().collect();
    for _ in 0..edits {
        let op = rng.gen_range(0..3);
        let pos = rng.gen_range(0..=chars.len());
        match op {
            0 => chars.insert(pos, *pool.choose(rng).expect("pool")),
            1 if pos < chars.len() => {
                chars.remove(pos);
            }
            _ if pos < chars.len() => chars[pos] = *pool.choose(rng).expect("pool"),
            _ => {}
        }
    }
    chars.into_iter().collect()
}

/// A catalog of 1 to 12 distinct entries and a query string that is either
/// noise or a perturbed acronym or title from the catalog.
pub fn venue_instance(rng: &mut impl Rng) -> (String, Vec<(String, String)>) {
    let n = rng.gen_range(1..=12);
    let mut catalog: Vec<(String, String)> = Vec::new();
    while catalog.len() < n {
        let acronym = word(rng, 2, 6).to_uppercase();
        let words = rng.gen_range(1..=5);
        let title = (0..words)
            .map(|_| {
                let mut w = word(rng, 2, 9);
                w[..1].make_ascii_uppercase();
                w
            })
            .collect::<Vec<_>>()
            .join(" ");
        if !catalog.contains(&(acronym.clone(), title.clone())) {
            catalog.push((acronym, title));
        }
    }
    let query = match rng.gen_range(0..3) {
        0 => edit_string(rng, 24),
        1 => {
            let (a, _) = catalog.choose(rng).expect("entry").clone();
            let edits = rng.gen_range(0..3);
            perturb(rng, &a, edits)
        }
        _ => {
            let (_, t) = catalog.choose(rng).expect("entry").clone();
            let edits = rng.gen_range(0..5);
            perturb(rng, &t, edits)
        }
    };
    (query, catalog)
}

fn restyle(rng: &mut impl Rng, title: &str) -> String {
    match rng.gen_range(0..4) {
        0 => title.to_uppercase(),
        1 => format!("{title}."),
        2 => title.replace(' ', "  - "),
        _ => title.to_string(),
    }
}

/// Result lists of 1 to 4 sources drawing from a shared pool of
/// publications. Copies of one publication always carry its year; the pool
/// also holds same-title entries from other years and dateless entries.
pub fn dedup_instance(rng: &mut impl Rng) -> Vec<(String, Vec<PublicationRecord>)> {
    let pool_size = rng.gen_range(2..=10);
    let mut pool: Vec<(String, String, Option<i32>)> = Vec::new();
    for _ in 0..pool_size {
        if !pool.is_empty() && rng.gen_bool(0.2) {
            let (t, v, _) = pool.choose(rng).expect("pool").clone();
            pool.push((t, v, Some(rng.gen_range(2000..2004))));
            continue;
        }
        let title = format!("{} {} {}", word(rng, 1, 3), word(rng, 1, 3), word(rng, 1, 2));
        let venue = ["VLDB", "SIGMOD", "Nucleic Acids Res", "ICDE"]
            .choose(rng)
            .expect("venue")
            .to_string();
        let date = (!rng.gen_bool(0.15)).then(|| rng.gen_range(2000..2004));
        pool.push((title, venue, date));
    }

    let sources = rng.gen_range(1..=4);
    (0..sources)
        .map(|s| {
            let count = rng.gen_range(0..=8);
            let mut records: Vec<PublicationRecord> = (0..count)
                .map(|i| {
                    let (title, venue, date) = pool.choose(rng).expect("pool").clone();
                    let rank = if rng.gen_bool(0.1) { 0 } else { i };
                    let mut r = PublicationRecord::new(restyle(rng, &title), format!("s{s}"), rank).with_venue(
                        if rng.gen_bool(0.3) {
                            venue.to_lowercase()
                        } else {
                            venue.clone()
                        },
                    );
                    r.date = date;
                    if rng.gen_bool(0.3) {
                        r.venue_norm = Some(VenueRef {
                            acronym: venue.to_uppercase(),
                            title: venue,
                        });
                    }
                    r
                })
                .collect();
            if rng.gen_bool(0.3) {
                records.shuffle(rng);
            }
            (format!("s{s}"), records)
        })
        .collect()
}

/// 1 to 5 documents of 1 to 10 terms from a six-word vocabulary.
pub fn scoring_instance(rng: &mut impl Rng) -> Vec<Doc> {
    const VOCAB: [&str; 6] = ["alpha", "beta", "gamma", "delta", "rank-based", "mirna"];
    let n = rng.gen_range(1..=5);
    (0..n)
        .map(|i| {
            let len = rng.gen_range(1..=10);
            let terms = (0..len)
                .map(|_| VOCAB.choose(rng).expect("vocab").to_string())
                .collect();
            let weight = match rng.gen_range(0..5) {
                0 => 1.0,
                1 => 1.5,
                2 => 1.75,
                3 => 2.0,
                _ => rng.gen_range(0.1..5.0),
            };
            (format!("d{i}"), terms, weight)
        })
        .collect()
}

const ICONS: [&str; 9] = [
    "flag-green",
    "flag-blue",
    "idea",
    "help",
    "list",
    "info",
    "button_ok",
    "stop",
    "family",
];

fn note_line(rng: &mut impl Rng) -> String {
    string_from(rng, "ab cd&<>é\"'", 12).trim().to_string()
}

fn random_node(rng: &mut impl Rng, id: usize, normal_form: bool) -> MindmapNode {
    let mut node = MindmapNode::topic(format!("ID_{id}"), string_from(rng, MIXED, 16));
    if rng.gen_bool(0.2) {
        node.text.push_str("\n2nd\r line");
    }
    for _ in 0..rng.gen_range(0..3) {
        node.icons.push(ICONS.choose(rng).expect("icon").to_string());
    }
    node.cloud = rng.gen_bool(0.1);
    if rng.gen_bool(0.3) {
        node.link = Some(format!("http://example.org/{}?a=1&b={}", word(rng, 1, 6), id));
    }
    if rng.gen_bool(0.3) {
        let lines: Vec<String> = (0..rng.gen_range(0..3)).map(|_| note_line(rng)).collect();
        node.detail_note = Some(lines.join("\n"));
    }
    if rng.gen_bool(0.2) {
        node.created = Some(rng.gen_range(1_000_000_000_000u64..2_000_000_000_000).to_string());
        node.modified = node.created.clone();
    }
    node.kind = if normal_form {
        node.inferred_kind()
    } else {
        *ElementKind::ALL.choose(rng).expect("kind")
    };
    node
}

/// A random tree of 1 to `max_nodes` nodes with unique ids `ID_0..`.
///
/// In normal form every node's kind is the one its markers imply, which is
/// what parsing produces; otherwise kinds are arbitrary.
pub fn mindmap(rng: &mut impl Rng, max_nodes: usize, normal_form: bool) -> Mindmap {
    let n = rng.gen_range(1..=max_nodes.max(1));
    let mut nodes: Vec<MindmapNode> = (0..n).map(|i| random_node(rng, i, normal_form)).collect();
    let parents: Vec<usize> = (1..n).map(|i| rng.gen_range(0..i)).collect();
    // attach from the last node back so each child is complete when moved
    for i in (1..n).rev() {
        let child = std::mem::replace(&mut nodes[i], MindmapNode::topic("", ""));
        nodes[parents[i - 1]].children.insert(0, child);
    }
    let root = nodes.swap_remove(0);
    Mindmap::new(root).expect("unique ids")
}

const TAGS: [&str; 20] = [
    "p", "b", "i", "div", "table", "tr", "td", "th", "li", "ul", "a", "br", "img", "script", "style", "HTML", "Body",
    "x:y", "1bad", "td\u{e9}",
];

fn attribute(rng: &mut impl Rng) -> String {
    let name = [
        "class", "id", "href", "xmlns", "xmlns:o", "data-x", "a:b", "CLASS", "=", "1n",
    ]
    .choose(rng)
    .expect("attr");
    match rng.gen_range(0..5) {
        0 => name.to_string(),
        1 => format!("{name}={}", word(rng, 0, 4)),
        2 => format!("{name}='{}'", string_from(rng, "a\"<>& ", 5)),
        3 => format!("{name}=\"{}\"", string_from(rng, "a'<>& \u{1}", 5)),
        _ => format!("{name}=\"unterminated"),
    }
}

/// Malformed HTML: unbalanced and misnested tags, odd names and
/// attributes, stray markup characters, entities, comments and control
/// characters.
pub fn tag_soup(rng: &mut impl Rng) -> String {
    let mut out = String::new();
    for _ in 0..rng.gen_range(0..40) {
        let tag = TAGS.choose(rng).expect("tag");
        match rng.gen_range(0..12) {
            0..=2 => {
                out.push('<');
                out.push_str(tag);
                for _ in 0..rng.gen_range(0..3) {
                    out.push(' ');
                    out.push_str(&attribute(rng));
                }
                if rng.gen_bool(0.1) {
                    out.push('/');
                }
                out.push('>');
            }
            3 | 4 => out.push_str(&format!("</{tag}>")),
            5 | 6 => out.push_str(&string_from(rng, MIXED, 10)),
            7 => out.push_str(
                [
                    "&amp;",
                    "&lt;",
                    "&bogus;",
                    "&#0;",
                    "&#x1F600;",
                    "&#xD800;",
                    "&nbsp",
                    "&",
                    "&#12",
                ]
                .choose(rng)
                .expect("entity"),
            ),
            8 => out.push_str(
                [
                    "<!-- c -->",
                    "<!--",
                    "<!DOCTYPE html>",
                    "<![CDATA[x]]>",
                    "<?php ?>",
                    "-->",
                ]
                .choose(rng)
                .expect("markup"),
            ),
            9 => out.push_str(["<", ">", "</", "< p>", "<>", "</>"].choose(rng).expect("stray")),
            10 => out.push(char::from(rng.gen_range(0u8..32))),
            _ => out.push_str("<script>if (a < b && c) { x('</b>') }</script>"),
        }
    }
    out
}
