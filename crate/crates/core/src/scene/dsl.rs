//! The blueprint DSL: a JSON document of canvas, assets and ordered skill calls.
//!
//! ```json
//! {
//!   "canvas": {"w_in": 13.333, "h_in": 7.5},
//!   "assets": [{"id": "microscope", "path": "assets/microscope.png"}],
//!   "ops": [
//!     {"skill": "add_container", "x": 0.5, "y": 1.0, "w": 4.0, "h": 5.0, "title": "Encoder Layers"},
//!     {"skill": "add_block", "id": "in", "x": 1.0, "y": 2.0, "w": 2.0, "h": 1.0, "text": "Input"}
//!   ]
//! }
//! ```
//!
//! Errors carry the line and column of the offending value so they can be
//! pasted verbatim into a repair prompt.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use serde_json::{json, Map, Value};

use super::units::fractional_digits;
use super::{
    ArrowHead, BlockStyle, Canvas, Color, ConnectorKind, ConnectorStyle, ContainerStyle, ElementId, Emu, NodeKind,
    Scene, SceneError, ShapeKind, TextSpec,
};
use crate::geom::Rect;

/// Parameter table for one skill.
#[derive(Debug, Clone, Copy)]
pub struct SkillDef {
    pub name: &'static str,
    pub required: &'static [&'static str],
    pub optional: &'static [&'static str],
}

impl SkillDef {
    pub fn params(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.required.iter().chain(self.optional.iter()).copied()
    }

    pub fn accepts(&self, param: &str) -> bool {
        self.params().any(|p| p == param)
    }

    pub fn param_list(&self) -> String {
        self.params().collect::<Vec<_>>().join(", ")
    }
}

pub const SKILLS: [SkillDef; 5] = [
    SkillDef {
        name: "add_container",
        required: &["x", "y", "w", "h"],
        optional: &["id", "title", "fill_color", "stroke_color", "alpha"],
    },
    SkillDef {
        name: "add_block",
        required: &["x", "y", "w", "h", "text"],
        optional: &["id", "shape_kind", "fill_color", "stroke_color", "font_size", "font_color", "bold"],
    },
    SkillDef {
        name: "add_text",
        required: &["x", "y", "w", "h", "text"],
        optional: &["id", "font_size", "font_color", "align", "bold"],
    },
    SkillDef {
        name: "add_icon",
        required: &["asset_id", "x", "y", "w", "h"],
        optional: &["id"],
    },
    SkillDef {
        name: "add_connector",
        required: &["src", "dst"],
        optional: &["id", "kind", "arrow_head", "line_width", "color"],
    },
];

pub fn skill(name: &str) -> Option<&'static SkillDef> {
    SKILLS.iter().find(|s| s.name == name)
}

pub fn skill_names() -> String {
    SKILLS.map(|s| s.name).join(", ")
}

/// One positional DSL error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlueprintError {
    pub line: usize,
    pub column: usize,
    pub code: String,
    pub message: String,
    /// Skill the error occurred in, when known.
    pub skill: Option<String>,
    /// Offending parameter or construct name, when known.
    pub param: Option<String>,
    /// Offending value, when it helps to name it.
    pub value: Option<String>,
}

impl fmt::Display for BlueprintError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}: {}", self.line, self.column, self.code, self.message)
    }
}

/// All errors found in one document, in document order.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct BlueprintErrors(pub Vec<BlueprintError>);

impl fmt::Display for BlueprintErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// A parsed, validated document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blueprint {
    pub scene: Scene,
    pub warnings: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum SerializeError {
    #[error("scene does not validate: {0}")]
    Invalid(String),
}

struct Source<'a> {
    text: &'a str,
}

impl<'a> Source<'a> {
    fn position(&self, raw: &RawValue) -> (usize, usize) {
        let base = self.text.as_ptr() as usize;
        let at = raw.get().as_ptr() as usize;
        let offset = at.saturating_sub(base).min(self.text.len());
        line_col(self.text, offset)
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    (line, col)
}

struct Ctx<'a> {
    src: Source<'a>,
    errors: Vec<BlueprintError>,
    warnings: Vec<String>,
}

impl<'a> Ctx<'a> {
    fn err(&mut self, at: (usize, usize), code: &str, message: String) -> &mut BlueprintError {
        self.errors.push(BlueprintError {
            line: at.0,
            column: at.1,
            code: code.to_string(),
            message,
            skill: None,
            param: None,
            value: None,
        });
        self.errors.last_mut().expect("just pushed")
    }
}

type Params<'a> = BTreeMap<String, &'a RawValue>;

/// Reads one op's parameters with positions.
struct OpReader<'c, 'a> {
    ctx: &'c mut Ctx<'a>,
    skill: &'static str,
    params: Params<'a>,
    at: (usize, usize),
    failed: bool,
}

impl<'c, 'a> OpReader<'c, 'a> {
    fn pos(&self, name: &str) -> (usize, usize) {
        self.params.get(name).map(|r| self.ctx.src.position(r)).unwrap_or(self.at)
    }

    fn fail(&mut self, name: &str, code: &str, message: String, value: Option<String>) {
        let at = self.pos(name);
        let skill = self.skill.to_string();
        let e = self.ctx.err(at, code, message);
        e.skill = Some(skill);
        e.param = Some(name.to_string());
        e.value = value;
        self.failed = true;
    }

    fn raw(&self, name: &str) -> Option<&'a RawValue> {
        self.params.get(name).copied()
    }

    fn number(&mut self, name: &str) -> Option<f64> {
        let raw = self.raw(name)?;
        match serde_json::from_str::<f64>(raw.get()) {
            Ok(v) if v.is_finite() => Some(v),
            _ => {
                self.fail(
                    name,
                    "INVALID_VALUE",
                    format!("parameter '{name}' of {} must be a number, got {}", self.skill, raw.get()),
                    Some(raw.get().to_string()),
                );
                None
            }
        }
    }

    fn string(&mut self, name: &str) -> Option<String> {
        let raw = self.raw(name)?;
        match serde_json::from_str::<String>(raw.get()) {
            Ok(v) => Some(v),
            Err(_) => {
                self.fail(
                    name,
                    "INVALID_VALUE",
                    format!("parameter '{name}' of {} must be a string, got {}", self.skill, raw.get()),
                    Some(raw.get().to_string()),
                );
                None
            }
        }
    }

    fn boolean(&mut self, name: &str) -> Option<bool> {
        let raw = self.raw(name)?;
        match serde_json::from_str::<bool>(raw.get()) {
            Ok(v) => Some(v),
            Err(_) => {
                self.fail(
                    name,
                    "INVALID_VALUE",
                    format!("parameter '{name}' of {} must be true or false", self.skill),
                    Some(raw.get().to_string()),
                );
                None
            }
        }
    }

    fn color(&mut self, name: &str, default: Color) -> Color {
        match self.string(name) {
            Some(s) => match s.parse::<Color>() {
                Ok(c) => c,
                Err(e) => {
                    self.fail(name, "INVALID_VALUE", e.to_string(), Some(s));
                    default
                }
            },
            None => default,
        }
    }

    fn inches(&mut self, name: &str) -> Emu {
        let Some(v) = self.number(name) else {
            return Emu::ZERO;
        };
        let c = Emu::from_inches(v);
        if !c.exact && fractional_digits(v) > 4 {
            let (line, col) = self.pos(name);
            self.ctx.warnings.push(format!(
                "line {line}, column {col}: {} '{name}' = {v} has more than 4 fractional digits; rounded to {} EMU",
                self.skill, c.emu
            ));
        }
        c.emu
    }

    fn bbox(&mut self) -> Rect {
        Rect {
            x: self.inches("x"),
            y: self.inches("y"),
            w: self.inches("w"),
            h: self.inches("h"),
        }
    }
}

/// Parses and validates a blueprint document.
pub fn parse_blueprint(text: &str) -> Result<Blueprint, BlueprintErrors> {
    let mut ctx = Ctx {
        src: Source { text },
        errors: Vec::new(),
        warnings: Vec::new(),
    };

    let top: BTreeMap<String, &RawValue> = match serde_json::from_str(text) {
        Ok(t) => t,
        Err(e) => {
            let code = "SYNTAX";
            let message = if e.is_data() {
                "document must be a JSON object with canvas, assets and ops".to_string()
            } else {
                format!("invalid JSON: {e}")
            };
            let at = (e.line().max(1), e.column().max(1));
            ctx.err(at, code, message);
            return Err(BlueprintErrors(ctx.errors));
        }
    };

    for (key, raw) in &top {
        if !matches!(key.as_str(), "canvas" | "assets" | "ops") {
            let at = ctx.src.position(raw);
            let e = ctx.err(
                at,
                "UNKNOWN_FIELD",
                format!("unknown top-level field '{key}'; valid fields are canvas, assets, ops"),
            );
            e.param = Some(key.clone());
        }
    }

    let canvas = match top.get("canvas") {
        Some(raw) => parse_canvas(&mut ctx, raw),
        None => Canvas::default(),
    };
    let mut scene = Scene::new(canvas);
    let mut defined_at: BTreeMap<ElementId, (usize, usize)> = BTreeMap::new();

    if let Some(raw) = top.get("assets") {
        parse_assets(&mut ctx, raw, &mut scene);
    }

    let ops: Vec<&RawValue> = match top.get("ops") {
        None => Vec::new(),
        Some(raw) => match serde_json::from_str(raw.get()) {
            Ok(ops) => ops,
            Err(_) => {
                let at = ctx.src.position(raw);
                ctx.err(at, "SYNTAX", "'ops' must be an array of skill calls".into());
                Vec::new()
            }
        },
    };

    // ids whose defining op failed; references to them are not reported again
    let mut failed_ids: BTreeSet<String> = BTreeSet::new();

    for raw_op in ops {
        let at = ctx.src.position(raw_op);
        let params: Params = match serde_json::from_str(raw_op.get()) {
            Ok(p) => p,
            Err(_) => {
                ctx.err(at, "SYNTAX", "each op must be a JSON object".into());
                continue;
            }
        };
        let Some(skill_raw) = params.get("skill").copied() else {
            ctx.err(at, "MISSING_PARAM", "op has no 'skill' field".into()).param = Some("skill".into());
            continue;
        };
        let skill_name = serde_json::from_str::<String>(skill_raw.get()).unwrap_or_else(|_| skill_raw.get().to_string());
        let Some(def) = skill(&skill_name) else {
            let at = ctx.src.position(skill_raw);
            let e = ctx.err(
                at,
                "UNKNOWN_SKILL",
                format!("unknown skill '{skill_name}'; valid skills are {}", skill_names()),
            );
            e.skill = Some(skill_name.clone());
            e.param = Some(skill_name);
            continue;
        };

        let mut params = params;
        params.remove("skill");
        let mut reader = OpReader {
            ctx: &mut ctx,
            skill: def.name,
            params,
            at,
            failed: false,
        };

        let names: Vec<String> = reader.params.keys().cloned().collect();
        for name in &names {
            if !def.accepts(name) {
                let msg = format!(
                    "unknown parameter '{name}' for skill '{}'; valid parameters are {}",
                    def.name,
                    def.param_list()
                );
                reader.fail(name, "UNKNOWN_PARAM", msg, None);
            }
        }
        for name in def.required {
            if !reader.params.contains_key(*name) {
                let msg = format!("skill '{}' requires parameter '{name}'", def.name);
                reader.fail(name, "MISSING_PARAM", msg, None);
            }
        }

        let explicit_id = reader.string("id");
        let result = build_op(&mut reader, &mut scene, explicit_id.clone(), &failed_ids);
        match result {
            Some(Ok(id)) if !reader.failed => {
                defined_at.insert(id, at);
            }
            Some(Ok(id)) => {
                // a parameter error was already reported; drop the element
                scene.remove_node(&id);
                scene.remove_connector(&id);
                failed_ids.insert(id.to_string());
            }
            Some(Err(e)) => {
                let (param, value) = scene_error_construct(&e);
                let p = param.unwrap_or_default();
                let pos = reader.pos(&p);
                let skill = def.name.to_string();
                let code = e.code();
                let be = reader.ctx.err(pos, code, format!("{}: {e}", def.name));
                be.skill = Some(skill);
                be.param = Some(p);
                be.value = value;
                if let Some(id) = explicit_id {
                    failed_ids.insert(id);
                }
            }
            None => {
                if let Some(id) = explicit_id {
                    failed_ids.insert(id);
                }
            }
        }
    }

    if ctx.errors.is_empty() {
        for v in scene.validate() {
            let at = v
                .element
                .as_ref()
                .and_then(|id| defined_at.get(id).copied())
                .unwrap_or((1, 1));
            let e = ctx.err(at, v.code.as_str(), v.message.clone());
            e.param = v.element.map(|id| id.to_string());
        }
    }

    if ctx.errors.is_empty() {
        Ok(Blueprint {
            scene,
            warnings: ctx.warnings,
        })
    } else {
        Err(BlueprintErrors(ctx.errors))
    }
}

fn scene_error_construct(e: &SceneError) -> (Option<String>, Option<String>) {
    match e {
        SceneError::NonPositiveSize { .. } => (Some("w".into()), None),
        SceneError::AlphaOutOfRange(v) => (Some("alpha".into()), Some(v.to_string())),
        SceneError::EmptyText => (Some("text".into()), None),
        SceneError::BadFontSize => (Some("font_size".into()), None),
        SceneError::BadLineWidth => (Some("line_width".into()), None),
        SceneError::UnknownAsset(a) => (Some("asset_id".into()), Some(a.clone())),
        SceneError::DuplicateAsset(a) => (Some("id".into()), Some(a.clone())),
        SceneError::MissingEndpoint(id) | SceneError::EndpointIsConnector(id) | SceneError::SelfLoop(id) => {
            (Some("dst".into()), Some(id.to_string()))
        }
        SceneError::DuplicateId(id) => (Some("id".into()), Some(id.to_string())),
        SceneError::EmptyId => (Some("id".into()), None),
        SceneError::InvalidShapeKind { given, .. } => (Some("shape_kind".into()), Some(given.clone())),
        SceneError::InvalidConnectorKind { given, .. } => (Some("kind".into()), Some(given.clone())),
        SceneError::InvalidArrowHead(v) => (Some("arrow_head".into()), Some(v.clone())),
        SceneError::InvalidAlign(v) => (Some("align".into()), Some(v.clone())),
    }
}

/// Builds one op. `None` means the op could not be attempted.
fn build_op(
    r: &mut OpReader<'_, '_>,
    scene: &mut Scene,
    id: Option<String>,
    failed_ids: &BTreeSet<String>,
) -> Option<Result<ElementId, SceneError>> {
    match r.skill {
        "add_container" => {
            let bbox = r.bbox();
            let style = ContainerStyle {
                id,
                title: r.string("title"),
                fill: r.color("fill_color", super::CONTAINER_FILL),
                stroke: r.color("stroke_color", super::CONTAINER_STROKE),
                alpha: r.number("alpha").unwrap_or(1.0),
            };
            Some(scene.add_container(bbox, style))
        }
        "add_block" => {
            let bbox = r.bbox();
            let text = r.string("text").unwrap_or_default();
            let shape = match r.string("shape_kind") {
                Some(s) => match s.parse::<ShapeKind>() {
                    Ok(k) => k,
                    Err(e) => return Some(Err(e)),
                },
                None => ShapeKind::Rect,
            };
            let defaults = BlockStyle::default();
            let style = BlockStyle {
                id,
                shape,
                fill: r.color("fill_color", defaults.fill),
                stroke: r.color("stroke_color", defaults.stroke),
                font_size: r.number("font_size").unwrap_or(defaults.font_size),
                font_color: r.color("font_color", Color::BLACK),
                bold: r.boolean("bold").unwrap_or(false),
            };
            Some(scene.add_block(bbox, &text, style))
        }
        "add_text" => {
            let bbox = r.bbox();
            let mut text = TextSpec::new(r.string("text").unwrap_or_default());
            if let Some(fs) = r.number("font_size") {
                text = text.size(fs);
            }
            text = text.color(r.color("font_color", Color::BLACK));
            if let Some(a) = r.string("align") {
                match a.parse() {
                    Ok(a) => text = text.align(a),
                    Err(e) => return Some(Err(e)),
                }
            }
            text = text.bold(r.boolean("bold").unwrap_or(false));
            Some(scene.add_text(bbox, text, id.as_deref()))
        }
        "add_icon" => {
            let asset = r.string("asset_id")?;
            let bbox = r.bbox();
            Some(scene.add_icon(&asset, bbox, id.as_deref()))
        }
        "add_connector" => {
            let src = r.string("src")?;
            let dst = r.string("dst")?;
            if failed_ids.contains(&src) || failed_ids.contains(&dst) {
                r.failed = true;
                return None;
            }
            let (Some(src), Some(dst)) = (ElementId::new(src), ElementId::new(dst)) else {
                return Some(Err(SceneError::EmptyId));
            };
            let kind = match r.string("kind") {
                Some(k) => match k.parse::<ConnectorKind>() {
                    Ok(k) => k,
                    Err(e) => return Some(Err(e)),
                },
                None => ConnectorKind::Elbow,
            };
            let arrow_head = match r.string("arrow_head") {
                Some(a) => match a.parse::<ArrowHead>() {
                    Ok(a) => a,
                    Err(e) => return Some(Err(e)),
                },
                None => ArrowHead::Medium,
            };
            let defaults = ConnectorStyle::default();
            let style = ConnectorStyle {
                id,
                arrow_head,
                line_width_pt: r.number("line_width").unwrap_or(defaults.line_width_pt),
                color: r.color("color", Color::BLACK),
            };
            if r.failed {
                return None;
            }
            Some(scene.add_connector(&src, &dst, kind, style))
        }
        _ => None,
    }
}

fn parse_canvas(ctx: &mut Ctx<'_>, raw: &RawValue) -> Canvas {
    let at = ctx.src.position(raw);
    let fields: BTreeMap<String, &RawValue> = match serde_json::from_str(raw.get()) {
        Ok(f) => f,
        Err(_) => {
            ctx.err(at, "SYNTAX", "canvas must be an object such as {\"w_in\": 13.333, \"h_in\": 7.5}".into());
            return Canvas::default();
        }
    };
    let keys: BTreeSet<&str> = fields.keys().map(|k| k.as_str()).collect();
    let (wk, hk, per_unit_cm) = if keys.contains("w_cm") || keys.contains("h_cm") {
        ("w_cm", "h_cm", true)
    } else {
        ("w_in", "h_in", false)
    };
    for k in &keys {
        if *k != wk && *k != hk {
            let pos = ctx.src.position(fields[*k]);
            let e = ctx.err(
                pos,
                "UNKNOWN_PARAM",
                format!("unknown canvas field '{k}'; use either w_cm/h_cm or w_in/h_in"),
            );
            e.skill = Some("canvas".into());
            e.param = Some(k.to_string());
        }
    }
    let mut dim = |key: &str| -> Option<Emu> {
        let Some(raw) = fields.get(key) else {
            let e = ctx.err(at, "MISSING_PARAM", format!("canvas requires '{key}'"));
            e.skill = Some("canvas".into());
            e.param = Some(key.into());
            return None;
        };
        let pos = ctx.src.position(raw);
        match serde_json::from_str::<f64>(raw.get()) {
            Ok(v) if v > 0.0 && v.is_finite() => {
                let c = if per_unit_cm { Emu::from_cm(v) } else { Emu::from_inches(v) };
                Some(c.emu)
            }
            _ => {
                let e = ctx.err(pos, "INVALID_VALUE", format!("canvas '{key}' must be a positive number"));
                e.skill = Some("canvas".into());
                e.param = Some(key.into());
                None
            }
        }
    };
    let w = dim(wk);
    let h = dim(hk);
    Canvas {
        width: w.unwrap_or(super::DEFAULT_CANVAS_WIDTH),
        height: h.unwrap_or(super::DEFAULT_CANVAS_HEIGHT),
    }
}

fn parse_assets(ctx: &mut Ctx<'_>, raw: &RawValue, scene: &mut Scene) {
    let at = ctx.src.position(raw);
    let items: Vec<&RawValue> = match serde_json::from_str(raw.get()) {
        Ok(i) => i,
        Err(_) => {
            ctx.err(at, "SYNTAX", "'assets' must be an array of {id, path} objects".into());
            return;
        }
    };
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct AssetEntry {
        id: String,
        path: String,
    }
    for item in items {
        let pos = ctx.src.position(item);
        match serde_json::from_str::<AssetEntry>(item.get()) {
            Ok(a) => {
                if let Err(e) = scene.add_asset(a.id.clone(), a.path) {
                    let be = ctx.err(pos, e.code(), e.to_string());
                    be.skill = Some("assets".into());
                    be.value = Some(a.id);
                }
            }
            Err(e) => {
                let be = ctx.err(pos, "INVALID_VALUE", format!("invalid asset entry: {e}"));
                be.skill = Some("assets".into());
            }
        }
    }
}

/// Shortest decimal with at most four fractional digits that maps back to `emu`,
/// falling back to full precision.
fn decimal_for(emu: Emu, per_unit: i64) -> f64 {
    let exact = emu.0 as f64 / per_unit as f64;
    for digits in 0..=4 {
        let scale = 10f64.powi(digits);
        let candidate = (exact * scale).round() / scale;
        let back = ((candidate * per_unit as f64) + 0.5).floor() as i64;
        if back == emu.0 {
            return candidate;
        }
    }
    exact
}

fn inch_value(emu: Emu) -> Value {
    json!(decimal_for(emu, super::units::EMU_PER_INCH))
}

fn points_value(emu: Emu) -> Value {
    json!(decimal_for(emu, super::units::EMU_PER_POINT))
}

fn geometry(op: &mut Map<String, Value>, r: &Rect) {
    op.insert("x".into(), inch_value(r.x));
    op.insert("y".into(), inch_value(r.y));
    op.insert("w".into(), inch_value(r.w));
    op.insert("h".into(), inch_value(r.h));
}

/// Canonical text for a valid scene. Routing is not part of the document.
pub fn serialize_blueprint(scene: &Scene) -> Result<String, SerializeError> {
    let violations = scene.validate();
    if !violations.is_empty() {
        let list = violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
        return Err(SerializeError::Invalid(list));
    }

    let mut doc = Map::new();
    let canvas = {
        let mut c = Map::new();
        let w_cm = decimal_for(scene.canvas.width, super::units::EMU_PER_CM);
        let h_cm = decimal_for(scene.canvas.height, super::units::EMU_PER_CM);
        let clean = |v: f64| fractional_digits(v) <= 4;
        if clean(w_cm) && clean(h_cm) && !(clean(decimal_for(scene.canvas.width, super::units::EMU_PER_INCH))
            && clean(decimal_for(scene.canvas.height, super::units::EMU_PER_INCH)))
        {
            c.insert("w_cm".into(), json!(w_cm));
            c.insert("h_cm".into(), json!(h_cm));
        } else {
            c.insert("w_in".into(), inch_value(scene.canvas.width));
            c.insert("h_in".into(), inch_value(scene.canvas.height));
        }
        Value::Object(c)
    };
    doc.insert("canvas".into(), canvas);
    let assets: Vec<Value> = scene
        .assets
        .iter()
        .map(|(id, a)| json!({"id": id, "path": a.path}))
        .collect();
    doc.insert("assets".into(), Value::Array(assets));

    let mut ops = Vec::new();
    for node in &scene.nodes {
        let mut op = Map::new();
        op.insert("skill".into(), json!(skill_for(&node.kind)));
        op.insert("id".into(), json!(node.id.as_str()));
        match &node.kind {
            NodeKind::Container {
                title,
                fill,
                stroke,
                alpha,
            } => {
                geometry(&mut op, &node.bbox);
                if let Some(t) = title {
                    op.insert("title".into(), json!(t.content));
                }
                op.insert("fill_color".into(), json!(fill.hex()));
                op.insert("stroke_color".into(), json!(stroke.hex()));
                op.insert("alpha".into(), json!(alpha.fraction()));
            }
            NodeKind::Block {
                shape,
                fill,
                stroke,
                label,
            } => {
                geometry(&mut op, &node.bbox);
                op.insert("text".into(), json!(label.content));
                op.insert("shape_kind".into(), json!(shape.as_str()));
                op.insert("fill_color".into(), json!(fill.hex()));
                op.insert("stroke_color".into(), json!(stroke.hex()));
                op.insert("font_size".into(), json!(label.font_size.points()));
                op.insert("font_color".into(), json!(label.color.hex()));
                op.insert("bold".into(), json!(label.bold));
            }
            NodeKind::TextBox { text } => {
                geometry(&mut op, &node.bbox);
                op.insert("text".into(), json!(text.content));
                op.insert("font_size".into(), json!(text.font_size.points()));
                op.insert("font_color".into(), json!(text.color.hex()));
                op.insert("align".into(), json!(text.align.as_str()));
                op.insert("bold".into(), json!(text.bold));
            }
            NodeKind::Icon { asset_id } => {
                op.insert("asset_id".into(), json!(asset_id));
                geometry(&mut op, &node.bbox);
            }
        }
        ops.push(Value::Object(op));
    }
    for conn in &scene.connectors {
        let mut op = Map::new();
        op.insert("skill".into(), json!("add_connector"));
        op.insert("id".into(), json!(conn.id.as_str()));
        op.insert("src".into(), json!(conn.src.as_str()));
        op.insert("dst".into(), json!(conn.dst.as_str()));
        op.insert("kind".into(), json!(conn.kind.as_str()));
        op.insert("arrow_head".into(), json!(conn.arrow_head.as_str()));
        op.insert("line_width".into(), points_value(conn.line_width));
        op.insert("color".into(), json!(conn.color.hex()));
        ops.push(Value::Object(op));
    }
    doc.insert("ops".into(), Value::Array(ops));

    let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("json values serialize");
    text.push('\n');
    Ok(text)
}

fn skill_for(kind: &NodeKind) -> &'static str {
    match kind {
        NodeKind::Container { .. } => "add_container",
        NodeKind::Block { .. } => "add_block",
        NodeKind::TextBox { .. } => "add_text",
        NodeKind::Icon { .. } => "add_icon",
    }
}
