use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ElementId, NodeKind, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    DuplicateId,
    DanglingEndpoint,
    EndpointNotNode,
    SelfLoop,
    UnresolvedAsset,
    NonPositiveSize,
    AlphaRange,
    EmptyText,
    BadFontSize,
    BadLineWidth,
    BadCanvas,
    ZOrder,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::DuplicateId => "DUPLICATE_ID",
            ViolationCode::DanglingEndpoint => "DANGLING_ENDPOINT",
            ViolationCode::EndpointNotNode => "ENDPOINT_NOT_NODE",
            ViolationCode::SelfLoop => "SELF_LOOP",
            ViolationCode::UnresolvedAsset => "UNRESOLVED_ASSET",
            ViolationCode::NonPositiveSize => "NON_POSITIVE_SIZE",
            ViolationCode::AlphaRange => "ALPHA_RANGE",
            ViolationCode::EmptyText => "EMPTY_TEXT",
            ViolationCode::BadFontSize => "BAD_FONT_SIZE",
            ViolationCode::BadLineWidth => "BAD_LINE_WIDTH",
            ViolationCode::BadCanvas => "BAD_CANVAS",
            ViolationCode::ZOrder => "Z_ORDER",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One structural problem; `element` is the offending element when there is one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub element: Option<ElementId>,
    pub message: String,
}

impl Violation {
    fn new(code: ViolationCode, element: Option<&ElementId>, message: String) -> Violation {
        Violation {
            code,
            element: element.cloned(),
            message,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.element {
            Some(id) => write!(f, "{}({}): {}", self.code, id, self.message),
            None => write!(f, "{}: {}", self.code, self.message),
        }
    }
}

pub(super) fn validate(scene: &Scene) -> Vec<Violation> {
    use ViolationCode::*;
    let mut out = Vec::new();

    if scene.canvas.width.0 <= 0 || scene.canvas.height.0 <= 0 {
        out.push(Violation::new(BadCanvas, None, "canvas must have positive size".into()));
    }

    let mut seen: BTreeMap<&ElementId, usize> = BTreeMap::new();
    let ids = scene
        .nodes
        .iter()
        .map(|n| &n.id)
        .chain(scene.connectors.iter().map(|c| &c.id));
    for id in ids {
        let count = seen.entry(id).or_insert(0);
        *count += 1;
        if *count == 2 {
            out.push(Violation::new(DuplicateId, Some(id), format!("id '{id}' is used more than once")));
        }
    }

    for node in &scene.nodes {
        if node.bbox.w.0 <= 0 || node.bbox.h.0 <= 0 {
            out.push(Violation::new(
                NonPositiveSize,
                Some(&node.id),
                format!("{} '{}' has a non-positive size", node.kind.type_name(), node.id),
            ));
        }
        match &node.kind {
            NodeKind::Container { alpha, .. } if alpha.0 > 100_000 => {
                out.push(Violation::new(AlphaRange, Some(&node.id), "alpha exceeds 1.0".into()));
            }
            NodeKind::TextBox { text } if text.content.trim().is_empty() => {
                out.push(Violation::new(EmptyText, Some(&node.id), "text box has no content".into()));
            }
            NodeKind::Icon { asset_id } if !scene.assets.contains_key(asset_id) => {
                out.push(Violation::new(
                    UnresolvedAsset,
                    Some(&node.id),
                    format!("icon references unknown asset '{asset_id}'"),
                ));
            }
            _ => {}
        }
        if let Some(text) = node.kind.text() {
            if text.font_size.0 == 0 {
                out.push(Violation::new(BadFontSize, Some(&node.id), "font size must be positive".into()));
            }
        }
    }

    for (i, node) in scene.nodes.iter().enumerate() {
        if !node.is_container() {
            continue;
        }
        for earlier in &scene.nodes[..i] {
            let buried = if earlier.is_container() {
                node.bbox.contains_rect(&earlier.bbox) && node.bbox != earlier.bbox
            } else {
                node.bbox.interiors_overlap(&earlier.bbox)
            };
            if buried {
                out.push(Violation::new(
                    ZOrder,
                    Some(&node.id),
                    format!(
                        "container '{}' is drawn after '{}', which it covers; add containers first",
                        node.id, earlier.id
                    ),
                ));
                break;
            }
        }
    }

    for conn in &scene.connectors {
        for end in [&conn.src, &conn.dst] {
            if scene.node(end).is_none() {
                if scene.connector(end).is_some() {
                    out.push(Violation::new(
                        EndpointNotNode,
                        Some(&conn.id),
                        format!("connector '{}' attaches to connector '{end}'", conn.id),
                    ));
                } else {
                    out.push(Violation::new(
                        DanglingEndpoint,
                        Some(&conn.id),
                        format!("connector '{}' references missing element '{end}'", conn.id),
                    ));
                }
            }
        }
        if conn.src == conn.dst {
            out.push(Violation::new(SelfLoop, Some(&conn.id), "connector starts and ends on the same node".into()));
        }
        if conn.line_width.0 <= 0 {
            out.push(Violation::new(BadLineWidth, Some(&conn.id), "line width must be positive".into()));
        }
    }

    out
}
