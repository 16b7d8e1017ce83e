use std::collections::HashSet;
use std::fmt;

use roxmltree::{Document, Node};

use super::{Mindmap, MindmapError, MindmapNode, DEFAULT_FORMAT_VERSION};

/// Something in the input that is outside the supported `.mm` subset and was
/// dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub node_id: Option<String>,
    pub element: String,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node_id {
            Some(id) => write!(f, "dropped unsupported <{}> in node {id}", self.element),
            None => write!(f, "dropped unsupported <{}> under <map>", self.element),
        }
    }
}

/// Parse FreeMind XML. Unsupported elements are dropped and logged.
pub fn parse_mindmap(xml_text: &str) -> Result<Mindmap, MindmapError> {
    let (map, warnings) = parse_mindmap_with_warnings(xml_text)?;
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(map)
}

pub fn parse_mindmap_with_warnings(xml_text: &str) -> Result<(Mindmap, Vec<ParseWarning>), MindmapError> {
    let doc = Document::parse(xml_text).map_err(|e| MindmapError::MalformedXml(e.to_string()))?;
    let map_el = doc.root_element();
    if map_el.tag_name().name() != "map" {
        return Err(MindmapError::NotAMindmap(map_el.tag_name().name().to_string()));
    }
    let version = map_el
        .attribute("version")
        .unwrap_or(DEFAULT_FORMAT_VERSION)
        .to_string();

    let mut warnings = Vec::new();
    let mut root_el = None;
    for child in map_el.children().filter(Node::is_element) {
        if child.tag_name().name() == "node" && root_el.is_none() {
            root_el = Some(child);
        } else {
            warnings.push(ParseWarning {
                node_id: None,
                element: child.tag_name().name().to_string(),
            });
        }
    }
    let root_el = root_el.ok_or_else(|| MindmapError::MalformedXml("<map> has no root <node>".to_string()))?;

    let mut builder = Builder {
        next_index: 0,
        seen: HashSet::new(),
        warnings,
    };
    let root = builder.node(root_el)?;
    Ok((
        Mindmap {
            root,
            source_path: None,
            format_version: version,
        },
        builder.warnings,
    ))
}

struct Builder {
    next_index: usize,
    seen: HashSet<String>,
    warnings: Vec<ParseWarning>,
}

impl Builder {
    fn node(&mut self, el: Node<'_, '_>) -> Result<MindmapNode, MindmapError> {
        let index = self.next_index;
        self.next_index += 1;
        let id = match el.attribute("ID") {
            Some("") => return Err(MindmapError::EmptyId),
            Some(id) => id.to_string(),
            None => format!("ID_auto_{index}"),
        };
        if !self.seen.insert(id.clone()) {
            return Err(MindmapError::DuplicateId(id));
        }

        let mut node = MindmapNode::topic(id, el.attribute("TEXT").unwrap_or_default());
        node.link = el.attribute("LINK").map(str::to_string);
        node.created = el.attribute("CREATED").map(str::to_string);
        node.modified = el.attribute("MODIFIED").map(str::to_string);

        for child in el.children().filter(Node::is_element) {
            match child.tag_name().name() {
                "node" => {
                    let sub = self.node(child)?;
                    node.children.push(sub);
                }
                "icon" => {
                    if let Some(name) = child.attribute("BUILTIN") {
                        node.icons.push(name.to_string());
                    }
                }
                "cloud" => node.cloud = true,
                "richcontent" if child.attribute("TYPE").is_some_and(|t| t.eq_ignore_ascii_case("NOTE")) => {
                    node.detail_note = Some(note_text(child));
                }
                other => self.warnings.push(ParseWarning {
                    node_id: Some(node.id.clone()),
                    element: other.to_string(),
                }),
            }
        }
        node.kind = node.inferred_kind();
        Ok(node)
    }
}

/// One line per `<p>`; otherwise the whole text content, trimmed.
fn note_text(richcontent: Node<'_, '_>) -> String {
    let paragraphs: Vec<String> = richcontent
        .descendants()
        .filter(|n| n.is_element() && n.tag_name().name() == "p")
        .map(|p| descendant_text(p).trim().to_string())
        .collect();
    if paragraphs.is_empty() {
        descendant_text(richcontent).trim().to_string()
    } else {
        paragraphs.join("\n")
    }
}

fn descendant_text(node: Node<'_, '_>) -> String {
    node.descendants()
        .filter(Node::is_text)
        .filter_map(|n| n.text())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mindmap::ElementKind;

    #[test]
    fn minimal_document() {
        let map = parse_mindmap(r#"<map version="1.0.1"><node ID="r" TEXT="microRNA"/></map>"#).unwrap();
        assert_eq!(map.root.text, "microRNA");
        assert_eq!(map.root.id, "r");
        assert!(map.root.children.is_empty());
        assert_eq!(map.format_version, "1.0.1");
    }

    #[test]
    fn children_keep_order() {
        let map = parse_mindmap(
            r#"<map><node ID="r" TEXT="r"><node ID="a" TEXT="a"/><node ID="b" TEXT="b"/><node ID="c" TEXT="c"/></node></map>"#,
        )
        .unwrap();
        let texts: Vec<_> = map.root.children.iter().map(|c| c.text.as_str()).collect();
        assert_eq!(texts, ["a", "b", "c"]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_mindmap("<map><node"),
            Err(MindmapError::MalformedXml(_))
        ));
        assert_eq!(
            parse_mindmap("<html/>").unwrap_err(),
            MindmapError::NotAMindmap("html".into())
        );
        assert_eq!(
            parse_mindmap(r#"<map><node ID="x"><node ID="x"/></node></map>"#).unwrap_err(),
            MindmapError::DuplicateId("x".into())
        );
        assert!(matches!(parse_mindmap("<map/>"), Err(MindmapError::MalformedXml(_))));
    }

    #[test]
    fn attributes_icons_notes_and_entities() {
        let xml = r##"<map version="0.9.0">
  <node ID="r" TEXT="A &amp; B &#10;second" LINK="http://x.org/?a=1&amp;b=2" CREATED="1" MODIFIED="2" FOLDED="true">
    <icon BUILTIN="help"/>
    <edge COLOR="#808080"/>
    <cloud/>
    <richcontent TYPE="NOTE"><html><head></head><body>
      <p>
        first line
      </p>
      <p>second &lt;line&gt;</p>
    </body></html></richcontent>
  </node>
</map>"##;
        let (map, warnings) = parse_mindmap_with_warnings(xml).unwrap();
        let r = &map.root;
        assert_eq!(r.text, "A & B \nsecond");
        assert_eq!(r.link.as_deref(), Some("http://x.org/?a=1&b=2"));
        assert_eq!(r.icons, ["help"]);
        assert!(r.cloud);
        assert_eq!(r.detail_note.as_deref(), Some("first line\nsecond <line>"));
        assert_eq!(r.kind, ElementKind::Question);
        assert_eq!(r.created.as_deref(), Some("1"));
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].element, "edge");
    }

    #[test]
    fn synthesizes_missing_ids_from_preorder() {
        let map = parse_mindmap(
            r#"<map><node TEXT="r"><node TEXT="a"/><node ID="b" TEXT="b"/><node TEXT="c"/></node></map>"#,
        )
        .unwrap();
        let ids: Vec<_> = map.nodes().map(|n| n.id.clone()).collect();
        assert_eq!(ids, ["ID_auto_0", "ID_auto_1", "b", "ID_auto_3"]);
    }
}
