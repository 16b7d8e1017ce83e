mod common;

use std::collections::BTreeSet;

use mindforge_core::mindmap::{parse_mindmap, serialize_mindmap, ElementKind, MindmapError};
use mindforge_core::wrapper::fixture_key;
use mindforge_core::ErrorCode;

fn map_files() -> Vec<std::path::PathBuf> {
    let mut files: Vec<_> = std::fs::read_dir(common::fixture("mindmaps"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "mm"))
        .collect();
    files.sort();
    files
}

#[test]
fn every_map_round_trips() {
    let files = map_files();
    assert!(files.len() >= 10, "only {} maps", files.len());
    assert!(files.iter().any(|p| p.ends_with("fig2-microrna.mm")));
    for path in files {
        let text = std::fs::read_to_string(&path).unwrap();
        let map = parse_mindmap(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let written = serialize_mindmap(&map);
        let again = parse_mindmap(&written).unwrap();
        assert_eq!(again, map, "{}", path.display());
        assert_eq!(serialize_mindmap(&again), written, "{}", path.display());
    }
}

#[test]
fn invalid_maps_are_rejected() {
    let read = |name: &str| std::fs::read_to_string(common::fixture(&format!("mindmaps/invalid/{name}"))).unwrap();
    assert_eq!(
        parse_mindmap(&read("duplicate-ids.mm")).unwrap_err(),
        MindmapError::DuplicateId("child".into())
    );
    assert_eq!(parse_mindmap(&read("malformed.mm")).unwrap_err().code(), "MalformedXml");
    assert_eq!(parse_mindmap(&read("not-a-map.mm")).unwrap_err().code(), "NotAMindmap");
}

#[test]
fn figure_two_map_structure() {
    let map = common::map("fig2-microrna.mm");
    assert_eq!(map.root.text, "microRNA");
    let top: Vec<&str> = map.root.children.iter().map(|c| c.text.as_str()).collect();
    assert_eq!(
        top,
        [
            "microRNA targets",
            "microRNA transcripts",
            "miRNA incorporate into the RNA-Induced Silencing Complex (RISC)",
            "binding site features"
        ]
    );
    let prediction = map.node("ID_prediction").unwrap();
    let tools: Vec<&str> = prediction.children.iter().map(|c| c.text.as_str()).collect();
    assert_eq!(tools, ["DIANA-microT", "TargetScan"]);
    assert_eq!(map.node("ID_microt").unwrap().kind, ElementKind::Topic);
    assert_eq!(map.node("ID_risc").unwrap().kind, ElementKind::Detail);
    assert_eq!(map.node("ID_features").unwrap().kind, ElementKind::KeywordsObject);
    assert_eq!(map.node("ID_tarbase").unwrap().kind, ElementKind::Link);
    assert_eq!(map.nodes().count(), 9);
}

#[test]
fn web_fixtures_are_keyed_by_url() {
    let dir = common::web_dir();
    let listing = std::fs::read_to_string(dir.join("URLS.tsv")).unwrap();
    let mut listed = BTreeSet::new();
    for line in listing.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 3, "{line}");
        let (file, url) = (cols[0], cols[1]);
        let (stem, ext) = file.split_once('.').unwrap();
        assert_eq!(stem, fixture_key(url), "{url}");
        assert!(["html", "txt"].contains(&ext), "{file}");
        assert!(dir.join(file).is_file(), "{file} missing");
        assert!(listed.insert(file.to_string()), "{file} listed twice");
    }
    let on_disk: BTreeSet<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "URLS.tsv")
        .collect();
    assert_eq!(on_disk, listed);
}
