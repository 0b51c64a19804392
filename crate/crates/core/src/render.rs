//! Deterministic SVG snapshot of a routed scene.
//!
//! Coordinates are user units at 96 per inch (9525 EMU each). Text is laid
//! out with a fixed average glyph width, the same metric the text lint uses.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;

use serde::{Deserialize, Serialize};

use crate::geom::{Point, Rect};
use crate::pptx::xml::escape;
use crate::router;
use crate::scene::{Align, ArrowHead, Connector, ConnectorKind, ElementId, Emu, Node, NodeKind, Scene, ShapeKind, TextSpec};

pub const EMU_PER_USER_UNIT: f64 = 9525.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl ScreenBox {
    pub fn from_rect(r: &Rect) -> ScreenBox {
        ScreenBox {
            x: to_user(r.x.0),
            y: to_user(r.y.0),
            w: to_user(r.w.0),
            h: to_user(r.h.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderArtifact {
    pub svg: String,
    pub element_extents: BTreeMap<ElementId, ScreenBox>,
}

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("elbow connector '{0}' has not been routed")]
    UnroutedElbow(ElementId),
    #[error("connector '{0}' has a missing endpoint")]
    MissingEndpoint(ElementId),
    #[error("rasterizer failed: {0}")]
    Rasterize(String),
}

pub fn to_user(emu: i64) -> f64 {
    emu as f64 / EMU_PER_USER_UNIT
}

pub(crate) fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Average-glyph text metric, as multiples of the font size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TextMetric {
    pub char_width: f64,
    pub line_height: f64,
}

impl Default for TextMetric {
    fn default() -> Self {
        TextMetric {
            char_width: 0.52,
            line_height: 1.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TextExtent {
    pub lines: usize,
    pub width_pt: f64,
    pub height_pt: f64,
}

impl TextMetric {
    /// Greedy word wrap at `box_width_pt`; explicit newlines start new lines.
    /// A word wider than the box sits alone on its own line.
    pub fn wrap(&self, content: &str, size_pt: f64, box_width_pt: f64) -> Vec<String> {
        if content.is_empty() {
            return Vec::new();
        }
        let cw = self.char_width * size_pt;
        let mut lines = Vec::new();
        for para in content.split('\n') {
            let mut line = String::new();
            for word in para.split_whitespace() {
                if line.is_empty() {
                    line.push_str(word);
                    continue;
                }
                let candidate = line.chars().count() + 1 + word.chars().count();
                if candidate as f64 * cw <= box_width_pt + 1e-9 {
                    line.push(' ');
                    line.push_str(word);
                } else {
                    lines.push(std::mem::take(&mut line));
                    line.push_str(word);
                }
            }
            lines.push(line);
        }
        lines
    }

    pub fn estimate(&self, text: &TextSpec, box_width: Emu) -> TextExtent {
        let size = text.font_size.points();
        let lines = self.wrap(&text.content, size, box_width.to_points());
        let widest = lines.iter().map(|l| l.chars().count()).max().unwrap_or(0);
        TextExtent {
            lines: lines.len(),
            width_pt: widest as f64 * self.char_width * size,
            height_pt: lines.len() as f64 * self.line_height * size,
        }
    }
}

/// Extent of `text` wrapped at `box_width` under the default metric.
pub fn estimate_text_extent(text: &TextSpec, box_width: Emu) -> TextExtent {
    TextMetric::default().estimate(text, box_width)
}

fn text_svg(out: &mut String, text: &TextSpec, r: &Rect, top: bool, metric: &TextMetric) {
    let lines = metric.wrap(&text.content, text.font_size.points(), r.w.to_points());
    if lines.is_empty() {
        return;
    }
    let size_px = text.font_size.points() * 96.0 / 72.0;
    let lh = size_px * metric.line_height;
    let b = ScreenBox::from_rect(r);
    let (x, anchor) = match text.align {
        Align::Left => (b.x + 4.8, "start"),
        Align::Center => (b.x + b.w / 2.0, "middle"),
        Align::Right => (b.x + b.w - 4.8, "end"),
    };
    let block_h = lh * lines.len() as f64;
    let first_baseline = if top {
        b.y + 4.8 + size_px
    } else {
        b.y + (b.h - block_h) / 2.0 + lh / 2.0 + size_px * 0.35
    };
    let weight = if text.bold { " font-weight=\"bold\"" } else { "" };
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"Arial\" font-size=\"{}\" fill=\"#{}\" text-anchor=\"{anchor}\"{weight}>",
        num(x),
        num(first_baseline),
        num(size_px),
        text.color.hex()
    );
    for (k, line) in lines.iter().enumerate() {
        let dy = if k == 0 { 0.0 } else { lh };
        let _ = write!(out, "<tspan x=\"{}\" dy=\"{}\">{}</tspan>", num(x), num(dy), escape(line));
    }
    out.push_str("</text>");
}

fn shape_svg(out: &mut String, shape: ShapeKind, r: &Rect, style: &str) {
    let b = ScreenBox::from_rect(r);
    match shape {
        ShapeKind::Rect => {
            let _ = write!(out, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" {style}/>", num(b.x), num(b.y), num(b.w), num(b.h));
        }
        ShapeKind::RoundedRect => {
            let rad = b.w.min(b.h) * 0.16667;
            let _ = write!(
                out,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" rx=\"{}\" {style}/>",
                num(b.x),
                num(b.y),
                num(b.w),
                num(b.h),
                num(rad)
            );
        }
        ShapeKind::Ellipse => {
            let _ = write!(
                out,
                "<ellipse cx=\"{}\" cy=\"{}\" rx=\"{}\" ry=\"{}\" {style}/>",
                num(b.x + b.w / 2.0),
                num(b.y + b.h / 2.0),
                num(b.w / 2.0),
                num(b.h / 2.0)
            );
        }
        ShapeKind::Diamond => {
            let (cx, cy) = (b.x + b.w / 2.0, b.y + b.h / 2.0);
            let _ = write!(
                out,
                "<polygon points=\"{},{} {},{} {},{} {},{}\" {style}/>",
                num(cx),
                num(b.y),
                num(b.x + b.w),
                num(cy),
                num(cx),
                num(b.y + b.h),
                num(b.x),
                num(cy)
            );
        }
        ShapeKind::FoldedCorner => {
            let f = b.w.min(b.h) * 0.16667;
            let (x1, y1) = (b.x + b.w, b.y + b.h);
            let _ = write!(
                out,
                "<path d=\"M{},{} H{} V{} L{},{} H{} Z\" {style}/><path d=\"M{},{} L{},{} L{},{} Z\" {style}/>",
                num(b.x),
                num(b.y),
                num(x1),
                num(y1 - f),
                num(x1 - f),
                num(y1),
                num(b.x),
                num(x1 - f),
                num(y1),
                num(x1 - f + f * 0.2),
                num(y1 - f + f * 0.2),
                num(x1),
                num(y1 - f)
            );
        }
    }
}

fn node_svg(out: &mut String, node: &Node, metric: &TextMetric) {
    let name = escape(node.id.as_str());
    let _ = write!(out, "<g id=\"{name}\">");
    match &node.kind {
        NodeKind::Container {
            title,
            fill,
            stroke,
            alpha,
        } => {
            let style = format!(
                "fill=\"#{}\" fill-opacity=\"{}\" stroke=\"#{}\" stroke-width=\"1.333\"",
                fill.hex(),
                num(alpha.fraction()),
                stroke.hex()
            );
            shape_svg(out, ShapeKind::Rect, &node.bbox, &style);
            if let Some(t) = title {
                text_svg(out, t, &node.bbox, true, metric);
            }
        }
        NodeKind::Block {
            shape,
            fill,
            stroke,
            label,
        } => {
            let style = format!("fill=\"#{}\" stroke=\"#{}\" stroke-width=\"1.333\"", fill.hex(), stroke.hex());
            shape_svg(out, *shape, &node.bbox, &style);
            text_svg(out, label, &node.bbox, false, metric);
        }
        NodeKind::TextBox { text } => text_svg(out, text, &node.bbox, false, metric),
        NodeKind::Icon { asset_id } => {
            let b = ScreenBox::from_rect(&node.bbox);
            let _ = write!(
                out,
                "<image x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" preserveAspectRatio=\"none\" href=\"{}\"/>",
                num(b.x),
                num(b.y),
                num(b.w),
                num(b.h),
                escape(asset_id)
            );
        }
    }
    out.push_str("</g>");
}

fn arrow_factor(head: ArrowHead) -> Option<f64> {
    match head {
        ArrowHead::None => None,
        ArrowHead::Small => Some(2.0),
        ArrowHead::Medium => Some(3.0),
        ArrowHead::Large => Some(5.0),
    }
}

fn connector_svg(out: &mut String, scene: &Scene, conn: &Connector) -> Result<Vec<Point>, RenderError> {
    let routing = match &conn.routing {
        Some(r) => r.clone(),
        None if conn.kind == ConnectorKind::Elbow => return Err(RenderError::UnroutedElbow(conn.id.clone())),
        None => {
            let (s, d) = match (scene.node(&conn.src), scene.node(&conn.dst)) {
                (Some(s), Some(d)) => (s.bbox, d.bbox),
                _ => return Err(RenderError::MissingEndpoint(conn.id.clone())),
            };
            let (src_port, dst_port) = router::direct_ports(&s, &d);
            crate::scene::Routing {
                src_port,
                dst_port,
                waypoints: Vec::new(),
                fallback: false,
            }
        }
    };
    let routed = Connector {
        routing: Some(routing.clone()),
        ..conn.clone()
    };
    let pts = router::polyline(scene, &routed).ok_or_else(|| RenderError::MissingEndpoint(conn.id.clone()))?;
    let width = to_user(conn.line_width.0);
    let stroke = format!(
        "fill=\"none\" stroke=\"#{}\" stroke-width=\"{}\"",
        conn.color.hex(),
        num(width)
    );
    let name = escape(conn.id.as_str());
    let _ = write!(out, "<g id=\"{name}\">");
    let xy = |p: &Point| format!("{},{}", num(to_user(p.x)), num(to_user(p.y)));
    // the point the final approach comes from
    let mut approach = match conn.kind {
        ConnectorKind::Elbow => {
            let list: Vec<String> = pts.iter().map(xy).collect();
            let _ = write!(out, "<polyline points=\"{}\" {stroke}/>", list.join(" "));
            pts.iter().rev().skip(1).find(|p| **p != pts[pts.len() - 1]).copied()
        }
        ConnectorKind::Straight => {
            let (a, b) = (pts[0], pts[pts.len() - 1]);
            let _ = write!(
                out,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {stroke}/>",
                num(to_user(a.x)),
                num(to_user(a.y)),
                num(to_user(b.x)),
                num(to_user(b.y))
            );
            Some(a).filter(|a| *a != b)
        }
        ConnectorKind::Curve => {
            let (a, b) = (pts[0], pts[pts.len() - 1]);
            let c = router::curve_controls(a, routing.src_port, b, routing.dst_port);
            let _ = write!(out, "<path d=\"M{} C{} {} {}\" {stroke}/>", xy(&c[0]), xy(&c[1]), xy(&c[2]), xy(&c[3]));
            Some(c[2]).filter(|p| *p != b)
        }
    };
    if let Some(f) = arrow_factor(conn.arrow_head) {
        let tip = pts[pts.len() - 1];
        if approach.is_none() {
            let (nx, ny) = routing.dst_port.normal();
            approach = Some(Point::new(tip.x + nx, tip.y + ny));
        }
        let from = approach.expect("set above");
        let (dx, dy) = ((tip.x - from.x) as f64, (tip.y - from.y) as f64);
        let norm = (dx * dx + dy * dy).sqrt();
        let (ux, uy) = (dx / norm, dy / norm);
        let len = width.max(1.0) * f;
        let half = len * 0.5;
        let (tx, ty) = (to_user(tip.x), to_user(tip.y));
        let (bx, by) = (tx - ux * len, ty - uy * len);
        let _ = write!(
            out,
            "<polygon points=\"{},{} {},{} {},{}\" fill=\"#{}\"/>",
            num(tx),
            num(ty),
            num(bx - uy * half),
            num(by + ux * half),
            num(bx + uy * half),
            num(by - ux * half),
            conn.color.hex()
        );
    }
    out.push_str("</g>");
    Ok(pts)
}

fn bounds(points: &[Point]) -> Rect {
    let x0 = points.iter().map(|p| p.x).min().unwrap_or(0);
    let y0 = points.iter().map(|p| p.y).min().unwrap_or(0);
    let x1 = points.iter().map(|p| p.x).max().unwrap_or(0);
    let y1 = points.iter().map(|p| p.y).max().unwrap_or(0);
    Rect::new(x0, y0, x1 - x0, y1 - y0)
}

pub fn render_svg(scene: &Scene) -> Result<RenderArtifact, RenderError> {
    render_svg_with(scene, &TextMetric::default())
}

pub fn render_svg_with(scene: &Scene, metric: &TextMetric) -> Result<RenderArtifact, RenderError> {
    let canvas = ScreenBox::from_rect(&scene.canvas.rect());
    let mut svg = format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = num(canvas.w),
        h = num(canvas.h)
    );
    let _ = write!(svg, "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#FFFFFF\"/>", num(canvas.w), num(canvas.h));
    let mut extents = BTreeMap::new();
    for node in &scene.nodes {
        node_svg(&mut svg, node, metric);
        extents.insert(node.id.clone(), ScreenBox::from_rect(&node.bbox));
    }
    for conn in &scene.connectors {
        let pts = connector_svg(&mut svg, scene, conn)?;
        extents.insert(conn.id.clone(), ScreenBox::from_rect(&bounds(&pts)));
    }
    svg.push_str("</svg>\n");
    Ok(RenderArtifact {
        svg,
        element_extents: extents,
    })
}

/// Runs an external rasterizer. `command` is a shell command in which
/// `{input}` and `{output}` are replaced by the SVG path and `out`.
pub fn rasterize(svg: &str, command: &str, out: &Path) -> Result<(), RenderError> {
    let input = out.with_extension("svg");
    std::fs::write(&input, svg).map_err(|e| RenderError::Rasterize(format!("{}: {e}", input.display())))?;
    let cmd = command
        .replace("{input}", &input.display().to_string())
        .replace("{output}", &out.display().to_string());
    let status = Command::new("sh")
        .arg("-c")
        .arg(&cmd)
        .status()
        .map_err(|e| RenderError::Rasterize(e.to_string()))?;
    if !status.success() {
        return Err(RenderError::Rasterize(format!("'{cmd}' exited with {status}")));
    }
    if !out.exists() {
        return Err(RenderError::Rasterize(format!("'{cmd}' produced no {}", out.display())));
    }
    Ok(())
}
