use serde::{Deserialize, Serialize};

/// Element roles a mindmap node can play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Topic,
    LargerTopic,
    WaitingTopic,
    NeedsAction,
    Hot,
    Detail,
    Link,
    KeywordsObject,
    CodeObject,
    Question,
    Cloud,
}

impl ElementKind {
    pub const ALL: [ElementKind; 11] = [
        ElementKind::Topic,
        ElementKind::LargerTopic,
        ElementKind::WaitingTopic,
        ElementKind::NeedsAction,
        ElementKind::Hot,
        ElementKind::Detail,
        ElementKind::Link,
        ElementKind::KeywordsObject,
        ElementKind::CodeObject,
        ElementKind::Question,
        ElementKind::Cloud,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Topic => "topic",
            ElementKind::LargerTopic => "larger_topic",
            ElementKind::WaitingTopic => "waiting_topic",
            ElementKind::NeedsAction => "needs_action",
            ElementKind::Hot => "hot",
            ElementKind::Detail => "detail",
            ElementKind::Link => "link",
            ElementKind::KeywordsObject => "keywords_object",
            ElementKind::CodeObject => "code_object",
            ElementKind::Question => "question",
            ElementKind::Cloud => "cloud",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// The FreeMind builtin icon written to mark this kind when nothing else
    /// about the node implies it.
    pub fn marker_icon(self) -> &'static str {
        match self {
            ElementKind::Topic => "idea",
            ElementKind::LargerTopic => "full-1",
            ElementKind::WaitingTopic => "hourglass",
            ElementKind::NeedsAction => "launch",
            ElementKind::Hot => "messagebox_warning",
            ElementKind::Detail => "info",
            ElementKind::Link => "attach",
            ElementKind::KeywordsObject => "list",
            ElementKind::CodeObject => "pencil",
            ElementKind::Question => "help",
            ElementKind::Cloud => "family",
        }
    }
}

/// Kind signalled by a single icon, if any. Flag icons are selection markers
/// and carry no kind.
pub fn kind_for_icon(icon: &str) -> Option<ElementKind> {
    ElementKind::ALL.into_iter().find(|k| k.marker_icon() == icon)
}

/// Deterministic kind inference from what a `.mm` file actually stores.
///
/// Precedence: first icon (in node order) that maps to a kind, then a cloud,
/// then a note (Detail), then a link (Link), else Topic.
pub fn infer_kind<'a>(
    icons: impl IntoIterator<Item = &'a str>,
    cloud: bool,
    has_note: bool,
    has_link: bool,
) -> ElementKind {
    if let Some(kind) = icons.into_iter().find_map(kind_for_icon) {
        return kind;
    }
    if cloud {
        ElementKind::Cloud
    } else if has_note {
        ElementKind::Detail
    } else if has_link {
        ElementKind::Link
    } else {
        ElementKind::Topic
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marker_icons_are_distinct_and_invert() {
        for kind in ElementKind::ALL {
            assert_eq!(kind_for_icon(kind.marker_icon()), Some(kind));
            assert_eq!(ElementKind::from_name(kind.name()), Some(kind));
        }
    }

    #[test]
    fn inference_precedence() {
        assert_eq!(infer_kind([], false, false, false), ElementKind::Topic);
        assert_eq!(infer_kind([], false, false, true), ElementKind::Link);
        assert_eq!(infer_kind([], false, true, true), ElementKind::Detail);
        assert_eq!(infer_kind([], true, true, true), ElementKind::Cloud);
        assert_eq!(
            infer_kind(["flag-green", "help"], true, true, true),
            ElementKind::Question
        );
        assert_eq!(infer_kind(["flag-blue"], false, false, false), ElementKind::Topic);
        assert_eq!(
            infer_kind(["messagebox_warning", "help"], false, false, false),
            ElementKind::Hot
        );
    }
}
