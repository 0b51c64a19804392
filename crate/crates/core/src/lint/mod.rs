//! Deterministic visual diagnostics over a routed scene.
//!
//! Each check returns issues in scene order; [`run_lints`] concatenates them
//! by category and the caller renumbers on serialization.

mod issue;

use serde::{Deserialize, Serialize};

pub use issue::{
    issue_line_regex, parse_issue_list, parse_issue_list_lenient, sanitize, Category, Issue, IssueList,
    IssueParseCode, IssueParseError, ISSUE_LINE_PATTERN,
};

use crate::geom::{segment_hits_interior, Point, Rect};
use crate::render::TextMetric;
use crate::router::{self, direct_ports};
use crate::scene::{ArrowHead, Connector, ConnectorKind, Emu, FontSize, Node, NodeKind, Scene, TextSpec};

/// Text body inset on every side, matching the emitted `bodyPr`.
pub const TEXT_INSET: i64 = 45_720;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LintConfig {
    /// How far (EMU) an element may exit the canvas before it counts as clipped.
    pub boundary_tolerance: i64,
    pub min_line_width_pt: f64,
    pub max_line_width_pt: f64,
    /// Highest linearized luminance still accepted as dark text.
    pub dark_luminance: f64,
    pub min_font_pt: f64,
    /// Edge offsets in (0, window] EMU are reported as near misses.
    pub snap_window: i64,
    pub metric: TextMetric,
}

impl Default for LintConfig {
    fn default() -> Self {
        LintConfig {
            boundary_tolerance: 0,
            min_line_width_pt: 1.5,
            max_line_width_pt: 2.0,
            dark_luminance: 0.35,
            min_font_pt: 8.0,
            snap_window: 45_720,
            metric: TextMetric::default(),
        }
    }
}

fn inches(emu: i64) -> String {
    let s = format!("{:.2}", emu as f64 / 914_400.0);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "0" {
        "0.01".to_string()
    } else {
        s.to_string()
    }
}

fn pt(v: f64) -> String {
    let s = format!("{v:.1}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn connector_name(scene: &Scene, c: &Connector) -> String {
    let name = |id| scene.node(id).map(Node::display_name).unwrap_or_else(|| id.to_string());
    format!("connector '{}' from '{}' to '{}'", c.id, name(&c.src), name(&c.dst))
}

/// Polyline used for geometric checks. Unrouted straight and curved
/// connectors fall back to their direct ports; unrouted elbows have none.
fn drawn_polyline(scene: &Scene, c: &Connector) -> Option<Vec<Point>> {
    if c.routing.is_some() {
        return router::polyline(scene, c);
    }
    let (src, dst) = (scene.node(&c.src)?, scene.node(&c.dst)?);
    let (ps, pd) = direct_ports(&src.bbox, &dst.bbox);
    let (a, b) = (ps.point_on(&src.bbox), pd.point_on(&dst.bbox));
    match c.kind {
        ConnectorKind::Elbow => None,
        ConnectorKind::Straight => Some(vec![a, b]),
        ConnectorKind::Curve => Some(router::flatten_cubic(&router::curve_controls(a, ps, b, pd), 16)),
    }
}

pub fn lint_boundaries(scene: &Scene) -> Vec<Issue> {
    lint_boundaries_with(scene, &LintConfig::default())
}

pub fn lint_boundaries_with(scene: &Scene, cfg: &LintConfig) -> Vec<Issue> {
    let canvas = scene.canvas.rect();
    let tol = cfg.boundary_tolerance;
    let mut out = Vec::new();
    for n in &scene.nodes {
        let b = &n.bbox;
        let exits = [
            (b.right() - canvas.right(), "right", "LEFT"),
            (canvas.left() - b.left(), "left", "RIGHT"),
            (b.bottom() - canvas.bottom(), "bottom", "UP"),
            (canvas.top() - b.top(), "top", "DOWN"),
        ];
        let over: Vec<_> = exits.iter().filter(|(d, _, _)| *d > tol).collect();
        if over.is_empty() {
            continue;
        }
        let name = n.display_name();
        let too_wide = b.w.0 > canvas.w.0 || b.h.0 > canvas.h.0;
        let (desc, fix) = if too_wide {
            (
                format!("The '{name}' {} is larger than the canvas and is clipped", n.kind.type_name()),
                format!("Resize '{name}' to fit within the canvas"),
            )
        } else {
            let sides: Vec<&str> = over.iter().map(|(_, s, _)| *s).collect();
            let moves: Vec<String> = over
                .iter()
                .map(|(d, _, dir)| format!("{dir} by approximately {} in", inches(*d)))
                .collect();
            (
                format!(
                    "The '{name}' {} is clipped at the {} edge of the canvas",
                    n.kind.type_name(),
                    sides.join(" and ")
                ),
                format!("Shift '{name}' {}", moves.join(" and ")),
            )
        };
        out.push(Issue::new(Category::Boundaries, desc, fix, vec![n.id.clone()]));
    }
    for c in &scene.connectors {
        let Some(points) = drawn_polyline(scene, c) else { continue };
        let outside = points.iter().any(|p| {
            p.x < canvas.left() - tol || p.x > canvas.right() + tol || p.y < canvas.top() - tol || p.y > canvas.bottom() + tol
        });
        if outside {
            let name = connector_name(scene, c);
            out.push(Issue::new(
                Category::Boundaries,
                format!("The {name} runs outside the canvas"),
                "Reroute the connector so it stays inside the canvas",
                vec![c.id.clone()],
            ));
        }
    }
    out
}

pub fn lint_connectors(scene: &Scene) -> Vec<Issue> {
    lint_connectors_with(scene, &LintConfig::default())
}

pub fn lint_connectors_with(scene: &Scene, cfg: &LintConfig) -> Vec<Issue> {
    let mut out = Vec::new();
    for c in &scene.connectors {
        let name = connector_name(scene, c);
        let ids = vec![c.id.clone()];
        match drawn_polyline(scene, c) {
            Some(points) => {
                for node in router::obstacle_nodes(scene, c) {
                    let hit = points.windows(2).any(|s| segment_hits_interior(s[0], s[1], &node.bbox));
                    if !hit {
                        continue;
                    }
                    let fix = match c.kind {
                        ConnectorKind::Elbow => format!("Move '{}' out of the connector's path", node.display_name()),
                        _ => "Change the connector type to Elbow".to_string(),
                    };
                    out.push(Issue::new(
                        Category::Connectors,
                        format!("SEVERE: The {name} crosses through '{}'", node.display_name()),
                        fix,
                        vec![c.id.clone(), node.id.clone()],
                    ));
                }
            }
            None if scene.node(&c.src).is_some() && scene.node(&c.dst).is_some() => {
                out.push(Issue::new(
                    Category::Connectors,
                    format!("The {name} has no route"),
                    "Route the connector before rendering",
                    ids.clone(),
                ));
            }
            None => {}
        }
        if c.routing.as_ref().is_some_and(|r| r.fallback) {
            out.push(Issue::new(
                Category::Connectors,
                format!("The {name} could not be routed around obstacles"),
                "Move the blocks apart so the connector has a clear path",
                ids.clone(),
            ));
        }
        let w = c.line_width.to_points();
        if w + 1e-9 < cfg.min_line_width_pt || w - 1e-9 > cfg.max_line_width_pt {
            out.push(Issue::new(
                Category::Connectors,
                format!("The {name} is drawn at {} pt", pt(w)),
                format!("Set line width to {} pt", pt(cfg.min_line_width_pt)),
                ids.clone(),
            ));
        }
        if c.arrow_head == ArrowHead::Large {
            out.push(Issue::new(
                Category::Connectors,
                format!("Arrowheads on the {name} are too large"),
                "Reduce arrowhead size to Medium",
                ids,
            ));
        }
    }
    out
}

fn text_area(bbox: &Rect) -> (Emu, Emu) {
    (Emu((bbox.w.0 - 2 * TEXT_INSET).max(0)), Emu((bbox.h.0 - 2 * TEXT_INSET).max(0)))
}

fn fits(metric: &TextMetric, text: &TextSpec, w: Emu, h: Emu) -> bool {
    let e = metric.estimate(text, w);
    e.width_pt <= w.to_points() + 1e-9 && e.height_pt <= h.to_points() + 1e-9
}

/// Largest size at or above the legibility floor, in half-point steps,
/// that fits the box.
fn fitting_size(cfg: &LintConfig, text: &TextSpec, w: Emu, h: Emu) -> Option<f64> {
    let mut size = (text.font_size.points() * 2.0).floor() / 2.0;
    while size + 1e-9 >= cfg.min_font_pt {
        let mut trial = text.clone();
        trial.font_size = FontSize::from_points(size)?;
        if fits(&cfg.metric, &trial, w, h) {
            return Some(size);
        }
        size -= 0.5;
    }
    None
}

pub fn lint_text(scene: &Scene) -> Vec<Issue> {
    lint_text_with(scene, &LintConfig::default())
}

pub fn lint_text_with(scene: &Scene, cfg: &LintConfig) -> Vec<Issue> {
    let mut out = Vec::new();
    for n in &scene.nodes {
        let Some(text) = n.kind.text() else { continue };
        if text.content.trim().is_empty() {
            continue;
        }
        let name = n.display_name();
        let ids = vec![n.id.clone()];
        let (w, h) = match n.kind {
            // titles get one line at the top, the rest of the box is content
            NodeKind::Container { .. } => (text_area(&n.bbox).0, Emu(i64::MAX / 4)),
            _ => text_area(&n.bbox),
        };
        if !fits(&cfg.metric, text, w, h) {
            let e = cfg.metric.estimate(text, w);
            let fix = match fitting_size(cfg, text, w, h) {
                Some(size) if size + 1e-9 < text.font_size.points() => {
                    format!("Reduce the font size of '{name}' to {} pt", pt(size))
                }
                _ => {
                    let need_w = (Emu::points(e.width_pt).0 + 2 * TEXT_INSET).max(n.bbox.w.0);
                    let need_h = (Emu::points(e.height_pt).0 + 2 * TEXT_INSET).max(n.bbox.h.0);
                    format!("Enlarge '{name}' to at least {} x {} in", inches(need_w), inches(need_h))
                }
            };
            out.push(Issue::new(Category::Text, format!("The text of '{name}' spills out of its box"), fix, ids.clone()));
        }
        let lum = text.color.luminance();
        if lum > cfg.dark_luminance {
            out.push(Issue::new(
                Category::Text,
                format!("The '{name}' label is a light color (#{})", text.color.hex()),
                "Change font color to BLACK",
                ids.clone(),
            ));
        }
        let size = text.font_size.points();
        if size + 1e-9 < cfg.min_font_pt {
            out.push(Issue::new(
                Category::Text,
                format!("The '{name}' label is set at {} pt", pt(size)),
                format!("Increase the font size of '{name}' to {} pt", pt(cfg.min_font_pt)),
                ids,
            ));
        }
    }
    out
}

/// Index of the smallest container enclosing `n`, by area then scene order.
fn parent_of(scene: &Scene, n: &Node) -> Option<usize> {
    scene
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_container() && c.id != n.id && c.bbox.contains_rect(&n.bbox))
        .min_by_key(|(k, c)| (c.bbox.w.0 as i128 * c.bbox.h.0 as i128, *k))
        .map(|(k, _)| k)
}

pub fn lint_alignment(scene: &Scene) -> Vec<Issue> {
    lint_alignment_with(scene, &LintConfig::default())
}

pub fn lint_alignment_with(scene: &Scene, cfg: &LintConfig) -> Vec<Issue> {
    let blocks: Vec<(&Node, Option<usize>)> = scene
        .nodes
        .iter()
        .filter(|n| matches!(n.kind, NodeKind::Block { .. }))
        .map(|n| (n, parent_of(scene, n)))
        .collect();
    let mut out = Vec::new();
    for (i, (a, pa)) in blocks.iter().enumerate() {
        for (b, pb) in &blocks[i + 1..] {
            if pa != pb {
                continue;
            }
            let edges = [
                ("left", a.bbox.left(), b.bbox.left(), ("LEFT", "RIGHT")),
                ("top", a.bbox.top(), b.bbox.top(), ("UP", "DOWN")),
                ("right", a.bbox.right(), b.bbox.right(), ("LEFT", "RIGHT")),
                ("bottom", a.bbox.bottom(), b.bbox.bottom(), ("UP", "DOWN")),
            ];
            let near = edges.iter().find(|(_, ea, eb, _)| {
                let d = (ea - eb).abs();
                d > 0 && d <= cfg.snap_window
            });
            if let Some((edge, ea, eb, (dec, inc))) = near {
                let dir = if eb > ea { dec } else { inc };
                out.push(Issue::new(
                    Category::Alignment,
                    format!(
                        "The {edge} edges of '{}' and '{}' are misaligned by {} in",
                        a.display_name(),
                        b.display_name(),
                        inches((ea - eb).abs())
                    ),
                    format!(
                        "Shift '{}' {dir} by {} in to align its {edge} edge with '{}'",
                        b.display_name(),
                        inches((ea - eb).abs()),
                        a.display_name()
                    ),
                    vec![a.id.clone(), b.id.clone()],
                ));
            }
        }
    }
    for (i, (a, _)) in blocks.iter().enumerate() {
        for (b, _) in &blocks[i + 1..] {
            if a.bbox.interiors_overlap(&b.bbox) {
                out.push(Issue::new(
                    Category::Alignment,
                    format!("'{}' overlaps '{}'", a.display_name(), b.display_name()),
                    format!("Move '{}' so it no longer overlaps '{}'", b.display_name(), a.display_name()),
                    vec![a.id.clone(), b.id.clone()],
                ));
            }
        }
    }
    out
}

pub fn run_lints(scene: &Scene) -> IssueList {
    run_lints_with(scene, &LintConfig::default())
}

pub fn run_lints_with(scene: &Scene, cfg: &LintConfig) -> IssueList {
    let mut all = lint_boundaries_with(scene, cfg);
    all.extend(lint_connectors_with(scene, cfg));
    all.extend(lint_text_with(scene, cfg));
    all.extend(lint_alignment_with(scene, cfg));
    IssueList(all)
}

#[cfg(test)]
mod tests;
