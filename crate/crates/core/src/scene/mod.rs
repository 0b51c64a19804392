//! In-memory figure model and the standardized skills that build it.
//!
//! A [`Scene`] is a plain value: a canvas, z-ordered nodes, connectors
//! between nodes and a table of image assets. The `add_*` methods are the
//! skill layer; each checks its own preconditions and returns a fresh
//! [`ElementId`]. [`Scene::validate`] re-checks every invariant over the
//! whole graph and reports violations as data.

pub mod dsl;
pub mod units;
mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geom::{Point, Rect};
pub use units::{Alpha, Color, ElementId, Emu, FontSize};
pub use validate::{Violation, ViolationCode};

/// Default slide size, 13.333 x 7.5 in.
pub const DEFAULT_CANVAS_WIDTH: Emu = Emu(12_192_000);
pub const DEFAULT_CANVAS_HEIGHT: Emu = Emu(6_858_000);

pub const DEFAULT_FONT_SIZE: FontSize = FontSize(1400);
pub const DEFAULT_LINE_WIDTH: Emu = Emu(22_225); // 1.75 pt

pub const CONTAINER_FILL: Color = Color([0xF5, 0xF5, 0xF5]);
pub const CONTAINER_STROKE: Color = Color([0xCC, 0xCC, 0xCC]);
pub const BLOCK_FILL: Color = Color([0xFF, 0xFF, 0xFF]);
pub const BLOCK_STROKE: Color = Color([0x33, 0x33, 0x33]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Canvas {
    pub width: Emu,
    pub height: Emu,
}

impl Default for Canvas {
    fn default() -> Self {
        Canvas {
            width: DEFAULT_CANVAS_WIDTH,
            height: DEFAULT_CANVAS_HEIGHT,
        }
    }
}

impl Canvas {
    pub fn rect(&self) -> Rect {
        Rect {
            x: Emu::ZERO,
            y: Emu::ZERO,
            w: self.width,
            h: self.height,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Align {
    Left,
    #[default]
    Center,
    Right,
}

impl Align {
    pub const ALL: [Align; 3] = [Align::Left, Align::Center, Align::Right];

    pub fn as_str(self) -> &'static str {
        match self {
            Align::Left => "left",
            Align::Center => "center",
            Align::Right => "right",
        }
    }
}

impl FromStr for Align {
    type Err = SceneError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Align::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| SceneError::InvalidAlign(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TextSpec {
    pub content: String,
    pub font_size: FontSize,
    pub color: Color,
    pub align: Align,
    pub bold: bool,
}

impl TextSpec {
    /// Black, centered, regular weight at the default size.
    pub fn new(content: impl Into<String>) -> TextSpec {
        TextSpec {
            content: content.into(),
            font_size: DEFAULT_FONT_SIZE,
            color: Color::BLACK,
            align: Align::Center,
            bold: false,
        }
    }

    pub fn size(mut self, points: f64) -> TextSpec {
        if let Some(fs) = FontSize::from_points(points) {
            self.font_size = fs;
        } else {
            self.font_size = FontSize(0);
        }
        self
    }

    pub fn color(mut self, color: Color) -> TextSpec {
        self.color = color;
        self
    }

    pub fn align(mut self, align: Align) -> TextSpec {
        self.align = align;
        self
    }

    pub fn bold(mut self, bold: bool) -> TextSpec {
        self.bold = bold;
        self
    }
}

/// Closed set of node outlines. Lines are connectors, never shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Rect,
    RoundedRect,
    Ellipse,
    Diamond,
    FoldedCorner,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 5] = [
        ShapeKind::Rect,
        ShapeKind::RoundedRect,
        ShapeKind::Ellipse,
        ShapeKind::Diamond,
        ShapeKind::FoldedCorner,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ShapeKind::Rect => "rect",
            ShapeKind::RoundedRect => "rounded_rect",
            ShapeKind::Ellipse => "ellipse",
            ShapeKind::Diamond => "diamond",
            ShapeKind::FoldedCorner => "folded_corner",
        }
    }

    pub fn valid_list() -> String {
        ShapeKind::ALL.map(|k| k.as_str()).join(", ")
    }
}

impl FromStr for ShapeKind {
    type Err = SceneError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(kind) = ShapeKind::ALL.into_iter().find(|k| k.as_str() == s) {
            return Ok(kind);
        }
        let lowered = s.to_ascii_lowercase();
        let hint = match lowered.as_str() {
            "line" | "straight_line" | "arrow" => "shape kinds exclude lines; use add_connector".to_string(),
            "doc_tag" | "doctag" | "document" => {
                format!("shape '{s}' does not exist; use 'folded_corner' instead")
            }
            "rectangle" => "use 'rect'".to_string(),
            "rounded_rectangle" | "round_rect" => "use 'rounded_rect'".to_string(),
            "circle" | "oval" => "use 'ellipse'".to_string(),
            _ => format!("valid kinds are {}", ShapeKind::valid_list()),
        };
        Err(SceneError::InvalidShapeKind {
            given: s.to_string(),
            hint,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NodeKind {
    Container {
        title: Option<TextSpec>,
        fill: Color,
        stroke: Color,
        alpha: Alpha,
    },
    Block {
        shape: ShapeKind,
        fill: Color,
        stroke: Color,
        label: TextSpec,
    },
    TextBox {
        text: TextSpec,
    },
    Icon {
        asset_id: String,
    },
}

impl NodeKind {
    pub fn type_name(&self) -> &'static str {
        match self {
            NodeKind::Container { .. } => "container",
            NodeKind::Block { .. } => "block",
            NodeKind::TextBox { .. } => "text",
            NodeKind::Icon { .. } => "icon",
        }
    }

    /// The text this node displays, if any.
    pub fn text(&self) -> Option<&TextSpec> {
        match self {
            NodeKind::Container { title, .. } => title.as_ref(),
            NodeKind::Block { label, .. } => Some(label),
            NodeKind::TextBox { text } => Some(text),
            NodeKind::Icon { .. } => None,
        }
    }

    pub fn text_mut(&mut self) -> Option<&mut TextSpec> {
        match self {
            NodeKind::Container { title, .. } => title.as_mut(),
            NodeKind::Block { label, .. } => Some(label),
            NodeKind::TextBox { text } => Some(text),
            NodeKind::Icon { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Node {
    pub id: ElementId,
    pub bbox: Rect,
    pub kind: NodeKind,
}

impl Node {
    pub fn is_container(&self) -> bool {
        matches!(self.kind, NodeKind::Container { .. })
    }

    /// Human-facing name: the node's text when it has some, else its id.
    pub fn display_name(&self) -> String {
        match self.kind.text() {
            Some(t) if !t.content.trim().is_empty() => {
                t.content.split_whitespace().collect::<Vec<_>>().join(" ")
            }
            _ => self.id.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectorKind {
    Straight,
    Elbow,
    Curve,
}

impl ConnectorKind {
    pub const ALL: [ConnectorKind; 3] = [ConnectorKind::Straight, ConnectorKind::Elbow, ConnectorKind::Curve];

    pub fn as_str(self) -> &'static str {
        match self {
            ConnectorKind::Straight => "straight",
            ConnectorKind::Elbow => "elbow",
            ConnectorKind::Curve => "curve",
        }
    }
}

impl FromStr for ConnectorKind {
    type Err = SceneError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(kind) = ConnectorKind::ALL.into_iter().find(|k| k.as_str() == s) {
            return Ok(kind);
        }
        let hint = match s.to_ascii_lowercase().as_str() {
            "curved" => "use 'curve' (no 'd' at the end)".to_string(),
            "bent" | "orthogonal" | "polyline" => "use 'elbow'".to_string(),
            "line" => "use 'straight'".to_string(),
            _ => "valid kinds are straight, elbow, curve".to_string(),
        };
        Err(SceneError::InvalidConnectorKind {
            given: s.to_string(),
            hint,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrowHead {
    None,
    Small,
    #[default]
    Medium,
    Large,
}

impl ArrowHead {
    pub const ALL: [ArrowHead; 4] = [ArrowHead::None, ArrowHead::Small, ArrowHead::Medium, ArrowHead::Large];

    pub fn as_str(self) -> &'static str {
        match self {
            ArrowHead::None => "none",
            ArrowHead::Small => "small",
            ArrowHead::Medium => "medium",
            ArrowHead::Large => "large",
        }
    }
}

impl FromStr for ArrowHead {
    type Err = SceneError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ArrowHead::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| SceneError::InvalidArrowHead(s.to_string()))
    }
}

/// Side of a node where a connector attaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Port {
    Top,
    Bottom,
    Left,
    Right,
}

impl Port {
    pub const ALL: [Port; 4] = [Port::Top, Port::Bottom, Port::Left, Port::Right];

    /// Midpoint of the side of `r` this port names.
    pub fn point_on(self, r: &Rect) -> Point {
        let (cx2, cy2) = r.center2();
        match self {
            Port::Top => Point::new(cx2.div_euclid(2), r.top()),
            Port::Bottom => Point::new(cx2.div_euclid(2), r.bottom()),
            Port::Left => Point::new(r.left(), cy2.div_euclid(2)),
            Port::Right => Point::new(r.right(), cy2.div_euclid(2)),
        }
    }

    /// Outward unit normal.
    pub fn normal(self) -> (i64, i64) {
        match self {
            Port::Top => (0, -1),
            Port::Bottom => (0, 1),
            Port::Left => (-1, 0),
            Port::Right => (1, 0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Port::Top => "top",
            Port::Bottom => "bottom",
            Port::Left => "left",
            Port::Right => "right",
        }
    }
}

/// Router output stored on a connector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Routing {
    pub src_port: Port,
    pub dst_port: Port,
    /// Corner points from source port to destination port; elbow connectors only.
    pub waypoints: Vec<Point>,
    pub fallback: bool,
}

/// A typed edge between two nodes. There is deliberately no fill.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Connector {
    pub id: ElementId,
    pub src: ElementId,
    pub dst: ElementId,
    pub kind: ConnectorKind,
    pub arrow_head: ArrowHead,
    pub line_width: Emu,
    pub color: Color,
    pub routing: Option<Routing>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Asset {
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SceneError {
    #[error("{what} must have positive width and height")]
    NonPositiveSize { what: &'static str },
    #[error("alpha {0} is outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("text content must not be empty")]
    EmptyText,
    #[error("font size must be positive")]
    BadFontSize,
    #[error("line width must be positive")]
    BadLineWidth,
    #[error("asset '{0}' is not registered in the scene assets")]
    UnknownAsset(String),
    #[error("asset '{0}' is already registered")]
    DuplicateAsset(String),
    #[error("connector endpoint '{0}' does not exist")]
    MissingEndpoint(ElementId),
    #[error("connector endpoint '{0}' is a connector; connect nodes only")]
    EndpointIsConnector(ElementId),
    #[error("connector from '{0}' to itself is not supported")]
    SelfLoop(ElementId),
    #[error("element id '{0}' is already used")]
    DuplicateId(ElementId),
    #[error("element id must not be empty")]
    EmptyId,
    #[error("invalid shape_kind '{given}': {hint}")]
    InvalidShapeKind { given: String, hint: String },
    #[error("invalid connector kind '{given}': {hint}")]
    InvalidConnectorKind { given: String, hint: String },
    #[error("invalid arrow_head '{0}': valid values are none, small, medium, large")]
    InvalidArrowHead(String),
    #[error("invalid align '{0}': valid values are left, center, right")]
    InvalidAlign(String),
}

impl SceneError {
    /// Machine-readable code, shared with validation violations and the experience ledger.
    pub fn code(&self) -> &'static str {
        match self {
            SceneError::NonPositiveSize { .. } => "NON_POSITIVE_SIZE",
            SceneError::AlphaOutOfRange(_) => "ALPHA_RANGE",
            SceneError::EmptyText => "EMPTY_TEXT",
            SceneError::BadFontSize => "BAD_FONT_SIZE",
            SceneError::BadLineWidth => "BAD_LINE_WIDTH",
            SceneError::UnknownAsset(_) => "UNRESOLVED_ASSET",
            SceneError::DuplicateAsset(_) => "DUPLICATE_ASSET",
            SceneError::MissingEndpoint(_) => "DANGLING_ENDPOINT",
            SceneError::EndpointIsConnector(_) => "ENDPOINT_NOT_NODE",
            SceneError::SelfLoop(_) => "SELF_LOOP",
            SceneError::DuplicateId(_) => "DUPLICATE_ID",
            SceneError::EmptyId => "EMPTY_ID",
            SceneError::InvalidShapeKind { .. } => "INVALID_SHAPE_KIND",
            SceneError::InvalidConnectorKind { .. } => "INVALID_CONNECTOR_KIND",
            SceneError::InvalidArrowHead(_) => "INVALID_VALUE",
            SceneError::InvalidAlign(_) => "INVALID_VALUE",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContainerStyle {
    pub id: Option<String>,
    pub title: Option<String>,
    pub fill: Color,
    pub stroke: Color,
    pub alpha: f64,
}

impl Default for ContainerStyle {
    fn default() -> Self {
        ContainerStyle {
            id: None,
            title: None,
            fill: CONTAINER_FILL,
            stroke: CONTAINER_STROKE,
            alpha: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockStyle {
    pub id: Option<String>,
    pub shape: ShapeKind,
    pub fill: Color,
    pub stroke: Color,
    pub font_size: f64,
    pub font_color: Color,
    pub bold: bool,
}

impl Default for BlockStyle {
    fn default() -> Self {
        BlockStyle {
            id: None,
            shape: ShapeKind::Rect,
            fill: BLOCK_FILL,
            stroke: BLOCK_STROKE,
            font_size: DEFAULT_FONT_SIZE.points(),
            font_color: Color::BLACK,
            bold: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectorStyle {
    pub id: Option<String>,
    pub arrow_head: ArrowHead,
    pub line_width_pt: f64,
    pub color: Color,
}

impl Default for ConnectorStyle {
    fn default() -> Self {
        ConnectorStyle {
            id: None,
            arrow_head: ArrowHead::Medium,
            line_width_pt: DEFAULT_LINE_WIDTH.to_points(),
            color: Color::BLACK,
        }
    }
}

/// A figure: canvas, z-ordered nodes, connectors and assets.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Scene {
    pub canvas: Canvas,
    pub nodes: Vec<Node>,
    pub connectors: Vec<Connector>,
    pub assets: BTreeMap<String, Asset>,
    #[serde(skip)]
    next_id: u64,
}

impl PartialEq for Scene {
    fn eq(&self, other: &Self) -> bool {
        self.canvas == other.canvas
            && self.nodes == other.nodes
            && self.connectors == other.connectors
            && self.assets == other.assets
    }
}

impl Eq for Scene {}

impl Scene {
    pub fn new(canvas: Canvas) -> Scene {
        Scene {
            canvas,
            ..Default::default()
        }
    }

    pub fn node(&self, id: &ElementId) -> Option<&Node> {
        self.nodes.iter().find(|n| &n.id == id)
    }

    pub fn node_mut(&mut self, id: &ElementId) -> Option<&mut Node> {
        self.nodes.iter_mut().find(|n| &n.id == id)
    }

    pub fn connector(&self, id: &ElementId) -> Option<&Connector> {
        self.connectors.iter().find(|c| &c.id == id)
    }

    pub fn connector_mut(&mut self, id: &ElementId) -> Option<&mut Connector> {
        self.connectors.iter_mut().find(|c| &c.id == id)
    }

    pub fn contains_id(&self, id: &ElementId) -> bool {
        self.node(id).is_some() || self.connector(id).is_some()
    }

    pub fn element_count(&self) -> usize {
        self.nodes.len() + self.connectors.len()
    }

    /// Removes a node and returns it; connectors pointing at it are left dangling.
    pub fn remove_node(&mut self, id: &ElementId) -> Option<Node> {
        let pos = self.nodes.iter().position(|n| &n.id == id)?;
        Some(self.nodes.remove(pos))
    }

    pub fn remove_connector(&mut self, id: &ElementId) -> Option<Connector> {
        let pos = self.connectors.iter().position(|c| &c.id == id)?;
        Some(self.connectors.remove(pos))
    }

    pub fn add_asset(&mut self, id: impl Into<String>, path: impl Into<String>) -> Result<(), SceneError> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(SceneError::EmptyId);
        }
        if self.assets.contains_key(&id) {
            return Err(SceneError::DuplicateAsset(id));
        }
        self.assets.insert(id, Asset { path: path.into() });
        Ok(())
    }

    fn claim_id(&mut self, explicit: Option<&str>) -> Result<ElementId, SceneError> {
        if let Some(raw) = explicit {
            let id = ElementId::new(raw).ok_or(SceneError::EmptyId)?;
            if self.contains_id(&id) {
                return Err(SceneError::DuplicateId(id));
            }
            return Ok(id);
        }
        loop {
            self.next_id += 1;
            let id = ElementId::new(format!("e{}", self.next_id)).expect("non-empty");
            if !self.contains_id(&id) {
                return Ok(id);
            }
        }
    }

    fn check_box(bbox: &Rect, what: &'static str) -> Result<(), SceneError> {
        if bbox.w.0 <= 0 || bbox.h.0 <= 0 {
            return Err(SceneError::NonPositiveSize { what });
        }
        Ok(())
    }

    fn check_text(text: &TextSpec, allow_empty: bool) -> Result<(), SceneError> {
        if !allow_empty && text.content.trim().is_empty() {
            return Err(SceneError::EmptyText);
        }
        if text.font_size.0 == 0 {
            return Err(SceneError::BadFontSize);
        }
        Ok(())
    }

    /// Background grouping rectangle with an optional bold title at the top inside.
    /// Add containers before the nodes they enclose.
    pub fn add_container(&mut self, bbox: Rect, style: ContainerStyle) -> Result<ElementId, SceneError> {
        Self::check_box(&bbox, "container")?;
        let alpha = Alpha::from_fraction(style.alpha).ok_or(SceneError::AlphaOutOfRange(style.alpha))?;
        let title = style
            .title
            .filter(|t| !t.is_empty())
            .map(|t| TextSpec::new(t).bold(true));
        let id = self.claim_id(style.id.as_deref())?;
        self.nodes.push(Node {
            id: id.clone(),
            bbox,
            kind: NodeKind::Container {
                title,
                fill: style.fill,
                stroke: style.stroke,
                alpha,
            },
        });
        Ok(id)
    }

    pub fn add_block(&mut self, bbox: Rect, text: &str, style: BlockStyle) -> Result<ElementId, SceneError> {
        Self::check_box(&bbox, "block")?;
        let label = TextSpec::new(text)
            .size(style.font_size)
            .color(style.font_color)
            .bold(style.bold);
        Self::check_text(&label, true)?;
        let id = self.claim_id(style.id.as_deref())?;
        self.nodes.push(Node {
            id: id.clone(),
            bbox,
            kind: NodeKind::Block {
                shape: style.shape,
                fill: style.fill,
                stroke: style.stroke,
                label,
            },
        });
        Ok(id)
    }

    pub fn add_text(&mut self, bbox: Rect, text: TextSpec, id: Option<&str>) -> Result<ElementId, SceneError> {
        Self::check_box(&bbox, "text box")?;
        Self::check_text(&text, false)?;
        let id = self.claim_id(id)?;
        self.nodes.push(Node {
            id: id.clone(),
            bbox,
            kind: NodeKind::TextBox { text },
        });
        Ok(id)
    }

    pub fn add_icon(&mut self, asset_id: &str, bbox: Rect, id: Option<&str>) -> Result<ElementId, SceneError> {
        if !self.assets.contains_key(asset_id) {
            return Err(SceneError::UnknownAsset(asset_id.to_string()));
        }
        Self::check_box(&bbox, "icon")?;
        let id = self.claim_id(id)?;
        self.nodes.push(Node {
            id: id.clone(),
            bbox,
            kind: NodeKind::Icon {
                asset_id: asset_id.to_string(),
            },
        });
        Ok(id)
    }

    /// Connects two existing nodes. Routing is filled in later by the router.
    pub fn add_connector(
        &mut self,
        src: &ElementId,
        dst: &ElementId,
        kind: ConnectorKind,
        style: ConnectorStyle,
    ) -> Result<ElementId, SceneError> {
        for end in [src, dst] {
            if self.node(end).is_none() {
                if self.connector(end).is_some() {
                    return Err(SceneError::EndpointIsConnector(end.clone()));
                }
                return Err(SceneError::MissingEndpoint(end.clone()));
            }
        }
        if src == dst {
            return Err(SceneError::SelfLoop(src.clone()));
        }
        let line_width = Emu::points(style.line_width_pt);
        if !(style.line_width_pt.is_finite() && line_width.0 > 0) {
            return Err(SceneError::BadLineWidth);
        }
        let id = self.claim_id(style.id.as_deref())?;
        self.connectors.push(Connector {
            id: id.clone(),
            src: src.clone(),
            dst: dst.clone(),
            kind,
            arrow_head: style.arrow_head,
            line_width,
            color: style.color,
            routing: None,
        });
        Ok(id)
    }

    /// Every invariant violation in the scene; empty when the scene is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        validate::validate(self)
    }
}

impl fmt::Display for Scene {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "scene {}x{} EMU, {} nodes, {} connectors",
            self.canvas.width,
            self.canvas.height,
            self.nodes.len(),
            self.connectors.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64, y: f64, w: f64, h: f64) -> Rect {
        Rect::from_inches(x, y, w, h)
    }

    #[test]
    fn container_defaults() {
        let mut s = Scene::default();
        let id = s
            .add_container(
                r(0.5, 1.0, 4.0, 5.0),
                ContainerStyle {
                    title: Some("Encoder Layers".into()),
                    ..Default::default()
                },
            )
            .unwrap();
        let node = s.node(&id).unwrap();
        match &node.kind {
            NodeKind::Container {
                title,
                fill,
                stroke,
                alpha,
            } => {
                assert_eq!(fill.hex(), "F5F5F5");
                assert_eq!(stroke.hex(), "CCCCCC");
                assert_eq!(*alpha, Alpha::OPAQUE);
                let title = title.as_ref().unwrap();
                assert!(title.bold);
                assert_eq!(title.content, "Encoder Layers");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(node.bbox, Rect::new(457_200, 914_400, 3_657_600, 4_572_000));
    }

    #[test]
    fn container_alpha_and_size_errors() {
        let mut s = Scene::default();
        let id = s
            .add_container(r(1.0, 1.0, 2.0, 1.0), ContainerStyle { alpha: 0.2, ..Default::default() })
            .unwrap();
        match &s.node(&id).unwrap().kind {
            NodeKind::Container { alpha, .. } => assert_eq!(alpha.0, 20_000),
            _ => unreachable!(),
        }
        let err = s
            .add_container(r(1.0, 1.0, 0.0, 1.0), ContainerStyle::default())
            .unwrap_err();
        assert_eq!(err.code(), "NON_POSITIVE_SIZE");
        let err = s
            .add_container(r(1.0, 1.0, 1.0, 1.0), ContainerStyle { alpha: 1.5, ..Default::default() })
            .unwrap_err();
        assert_eq!(err, SceneError::AlphaOutOfRange(1.5));
    }

    #[test]
    fn block_label_defaults() {
        let mut s = Scene::default();
        let id = s.add_block(r(1.0, 1.0, 1.0, 0.5), "Input", BlockStyle::default()).unwrap();
        let label = s.node(&id).unwrap().kind.text().unwrap();
        assert_eq!(label.color, Color::BLACK);
        assert_eq!(label.align, Align::Center);
    }

    #[test]
    fn shape_kind_rejects_lines_and_doc_tag() {
        let err = "line".parse::<ShapeKind>().unwrap_err();
        assert!(err.to_string().contains("shape kinds exclude lines; use add_connector"));
        let err = "doc_tag".parse::<ShapeKind>().unwrap_err();
        assert!(err.to_string().contains("folded_corner"));
        let err = "hexagon".parse::<ShapeKind>().unwrap_err();
        assert!(err.to_string().contains(&ShapeKind::valid_list()));
    }

    #[test]
    fn no_shape_kind_is_a_line() {
        for kind in ShapeKind::ALL {
            assert!(!kind.as_str().contains("line"));
            assert_eq!(kind.as_str().parse::<ShapeKind>().unwrap(), kind);
        }
    }

    #[test]
    fn text_box_checks() {
        let mut s = Scene::default();
        let a = s.add_text(r(0.0, 0.0, 1.0, 1.0), TextSpec::new("a"), None).unwrap();
        let b = s.add_text(r(0.0, 0.0, 1.0, 1.0), TextSpec::new("b"), None).unwrap();
        assert_ne!(a, b);
        let t = s.node(&a).unwrap().kind.text().unwrap();
        assert_eq!(t.color.hex(), "000000");
        assert_eq!(t.align, Align::Center);
        assert_eq!(
            s.add_text(r(0.0, 0.0, 1.0, 1.0), TextSpec::new("x").size(0.0), None),
            Err(SceneError::BadFontSize)
        );
        assert_eq!(
            s.add_text(r(0.0, 0.0, 1.0, 1.0), TextSpec::new(""), None),
            Err(SceneError::EmptyText)
        );
    }

    #[test]
    fn icon_requires_registered_asset() {
        let mut s = Scene::default();
        s.add_asset("microscope", "assets/microscope.png").unwrap();
        let id = s.add_icon("microscope", r(1.0, 1.0, 1.0, 1.0), None).unwrap();
        assert!(matches!(&s.node(&id).unwrap().kind, NodeKind::Icon { asset_id } if asset_id == "microscope"));
        let err = s.add_icon("telescope", r(1.0, 1.0, 1.0, 1.0), None).unwrap_err();
        assert!(err.to_string().contains("telescope"));
        assert_eq!(
            s.add_icon("microscope", r(1.0, 1.0, 0.0, 0.0), None).unwrap_err().code(),
            "NON_POSITIVE_SIZE"
        );
    }

    #[test]
    fn connector_rules() {
        let mut s = Scene::default();
        let a = s.add_block(r(1.0, 1.0, 1.0, 1.0), "A", BlockStyle::default()).unwrap();
        let b = s.add_block(r(4.0, 1.0, 1.0, 1.0), "B", BlockStyle::default()).unwrap();
        let c = s.add_connector(&a, &b, ConnectorKind::Elbow, ConnectorStyle::default()).unwrap();
        let conn = s.connector(&c).unwrap();
        assert_eq!(conn.arrow_head, ArrowHead::Medium);
        assert_eq!(conn.line_width, Emu(22_225));
        assert!(conn.routing.is_none());

        let err = "curved".parse::<ConnectorKind>().unwrap_err();
        assert!(err.to_string().contains("'curve'"));
        assert_eq!(
            s.add_connector(&a, &a, ConnectorKind::Straight, ConnectorStyle::default()),
            Err(SceneError::SelfLoop(a.clone()))
        );
        assert_eq!(
            s.add_connector(&a, &c, ConnectorKind::Straight, ConnectorStyle::default()),
            Err(SceneError::EndpointIsConnector(c.clone()))
        );
        let ghost = ElementId::from("ghost");
        assert_eq!(
            s.add_connector(&a, &ghost, ConnectorKind::Straight, ConnectorStyle::default()),
            Err(SceneError::MissingEndpoint(ghost))
        );
    }

    #[test]
    fn explicit_ids_win_and_fresh_ids_skip_them() {
        let mut s = Scene::default();
        s.add_block(r(0.0, 0.0, 1.0, 1.0), "x", BlockStyle { id: Some("e1".into()), ..Default::default() })
            .unwrap();
        let fresh = s.add_block(r(0.0, 0.0, 1.0, 1.0), "y", BlockStyle::default()).unwrap();
        assert_eq!(fresh.as_str(), "e2");
        let dup = s.add_block(r(0.0, 0.0, 1.0, 1.0), "z", BlockStyle { id: Some("e2".into()), ..Default::default() });
        assert_eq!(dup, Err(SceneError::DuplicateId(ElementId::from("e2"))));
    }
}
