use std::collections::{BTreeMap, HashMap};

use roxmltree::{Document, Node};

use super::emit::{NS_A, NS_P, PRESENTATION_PART, SLIDE_PART};
use super::package::{self, part, read_zip, resolve_target, Parts, NS_R};
use super::{ForeignElement, ParsedArchive, PptxError, MARKER_NS, MARKER_URI};
use crate::diff::canonical::{canonical_map, hash_bytes, map_hash, CanonCtx};
use crate::geom::{Point, Rect};
use crate::scene::{
    Align, Alpha, ArrowHead, Asset, Canvas, Color, Connector, ConnectorKind, ElementId, Emu, FontSize, Node as SceneNode,
    NodeKind, Port, Routing, Scene, ShapeKind, TextSpec,
};

/// The unpacked slide part with what is needed to interpret it.
pub struct SlideSource {
    pub parts: Parts,
    pub slide_part: String,
    pub slide_xml: String,
    /// relationship id -> resolved part name
    pub rels: BTreeMap<String, String>,
}

fn utf8(parts: &Parts, name: &str) -> Result<String, PptxError> {
    let bytes = part(parts, name).ok_or_else(|| PptxError::MissingPart(name.to_string()))?;
    String::from_utf8(bytes.to_vec()).map_err(|e| PptxError::Malformed {
        part: name.to_string(),
        message: e.to_string(),
    })
}

fn malformed(part: &str) -> impl Fn(roxmltree::Error) -> PptxError + '_ {
    move |e| PptxError::Malformed {
        part: part.to_string(),
        message: e.to_string(),
    }
}

fn rel_targets(parts: &Parts, source: &str) -> Result<Vec<package::Rel>, PptxError> {
    let rels_name = package::rels_path_for(source);
    match part(parts, &rels_name) {
        None => Ok(Vec::new()),
        Some(_) => {
            let xml = utf8(parts, &rels_name)?;
            package::parse_rels(&xml).map_err(malformed(&rels_name))
        }
    }
}

/// Presentation part via the package rels, falling back to the canonical name.
fn presentation_part(parts: &Parts) -> Result<String, PptxError> {
    let rels = rel_targets(parts, "")?;
    Ok(rels
        .iter()
        .find(|r| r.rel_type == package::REL_OFFICE_DOC)
        .map(|r| resolve_target("", &r.target))
        .unwrap_or_else(|| PRESENTATION_PART.to_string()))
}

impl SlideSource {
    pub fn load(bytes: &[u8]) -> Result<SlideSource, PptxError> {
        let parts = read_zip(bytes)?;
        let pres = presentation_part(&parts)?;
        let slide_part = rel_targets(&parts, &pres)?
            .iter()
            .find(|r| r.rel_type == package::REL_SLIDE)
            .map(|r| resolve_target(&pres, &r.target))
            .unwrap_or_else(|| SLIDE_PART.to_string());
        let slide_xml = utf8(&parts, &slide_part)?;
        let rels = rel_targets(&parts, &slide_part)?
            .into_iter()
            .filter(|r| !r.external)
            .map(|r| (r.id, resolve_target(&slide_part, &r.target)))
            .collect();
        Ok(SlideSource {
            parts,
            slide_part,
            slide_xml,
            rels,
        })
    }

    pub fn document(&self) -> Result<Document<'_>, PptxError> {
        Document::parse(&self.slide_xml).map_err(malformed(&self.slide_part))
    }

    /// Relationship id -> content hash of the related part.
    pub fn media_hashes(&self) -> HashMap<String, String> {
        self.rels
            .iter()
            .filter_map(|(id, target)| part(&self.parts, target).map(|b| (id.clone(), hash_bytes(b))))
            .collect()
    }

    pub fn canvas(&self) -> Result<Canvas, PptxError> {
        let pres = presentation_part(&self.parts)?;
        let xml = utf8(&self.parts, &pres)?;
        let doc = Document::parse(&xml).map_err(malformed(&pres))?;
        let sz = doc
            .descendants()
            .find(|n| n.has_tag_name((NS_P, "sldSz")))
            .ok_or_else(|| PptxError::Invalid(format!("{pres} has no slide size")))?;
        Ok(Canvas {
            width: Emu(int_attr(sz, "cx")?),
            height: Emu(int_attr(sz, "cy")?),
        })
    }
}

/// Shape-tree children that are drawable elements.
pub fn sp_tree_elements<'a, 'i>(doc: &'a Document<'i>) -> Result<Vec<Node<'a, 'i>>, PptxError> {
    let tree = doc
        .descendants()
        .find(|n| n.has_tag_name((NS_P, "spTree")))
        .ok_or_else(|| PptxError::Invalid("slide has no shape tree".into()))?;
    Ok(tree
        .children()
        .filter(|n| n.is_element())
        .filter(|n| !n.has_tag_name((NS_P, "nvGrpSpPr")) && !n.has_tag_name((NS_P, "grpSpPr")))
        .filter(|n| !n.has_tag_name((NS_P, "extLst")))
        .collect())
}

fn child<'a, 'i>(n: Node<'a, 'i>, ns: &str, name: &str) -> Option<Node<'a, 'i>> {
    n.children().find(|c| c.has_tag_name((ns, name)))
}

fn path<'a, 'i>(n: Node<'a, 'i>, steps: &[(&str, &str)]) -> Option<Node<'a, 'i>> {
    steps.iter().try_fold(n, |cur, (ns, name)| child(cur, ns, name))
}

/// The element's `cNvPr`, wherever its non-visual wrapper puts it.
pub fn c_nv_pr<'a, 'i>(el: Node<'a, 'i>) -> Option<Node<'a, 'i>> {
    el.children()
        .filter(|c| c.is_element() && c.tag_name().name().starts_with("nv"))
        .find_map(|nv| child(nv, NS_P, "cNvPr"))
}

/// The marker element our writer attaches to authored elements.
pub fn marker<'a, 'i>(el: Node<'a, 'i>) -> Option<Node<'a, 'i>> {
    let ext_lst = child(c_nv_pr(el)?, NS_A, "extLst")?;
    ext_lst
        .children()
        .filter(|e| e.has_tag_name((NS_A, "ext")) && e.attribute("uri") == Some(MARKER_URI))
        .find_map(|e| child(e, MARKER_NS, "el"))
}

fn int_attr(n: Node, name: &str) -> Result<i64, PptxError> {
    let raw = n
        .attribute(name)
        .ok_or_else(|| PptxError::Invalid(format!("<{}> lacks '{name}'", n.tag_name().name())))?;
    raw.trim()
        .parse()
        .map_err(|_| PptxError::Invalid(format!("<{}> has non-integer {name}='{raw}'", n.tag_name().name())))
}

fn invalid(what: &str, id: &str) -> PptxError {
    PptxError::Invalid(format!("element '{id}': {what}"))
}

fn bbox(el: Node, id: &str) -> Result<Rect, PptxError> {
    let x = path(el, &[(NS_P, "spPr"), (NS_A, "xfrm")]).ok_or_else(|| invalid("missing transform", id))?;
    let off = child(x, NS_A, "off").ok_or_else(|| invalid("missing offset", id))?;
    let ext = child(x, NS_A, "ext").ok_or_else(|| invalid("missing extent", id))?;
    Ok(Rect::new(int_attr(off, "x")?, int_attr(off, "y")?, int_attr(ext, "cx")?, int_attr(ext, "cy")?))
}

fn color_of(fill: Node, id: &str) -> Result<(Color, Alpha), PptxError> {
    let clr = child(fill, NS_A, "srgbClr").ok_or_else(|| invalid("fill is not an sRGB color", id))?;
    let color = clr
        .attribute("val")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| invalid("bad color value", id))?;
    let alpha = match child(clr, NS_A, "alpha") {
        Some(a) => Alpha(int_attr(a, "val")? as u32),
        None => Alpha::OPAQUE,
    };
    Ok((color, alpha))
}

fn shape_fill(el: Node, id: &str) -> Result<(Color, Alpha), PptxError> {
    let fill = path(el, &[(NS_P, "spPr"), (NS_A, "solidFill")]).ok_or_else(|| invalid("missing fill", id))?;
    color_of(fill, id)
}

fn line_props<'a, 'i>(el: Node<'a, 'i>, id: &str) -> Result<(Color, i64, Option<Node<'a, 'i>>), PptxError> {
    let ln = path(el, &[(NS_P, "spPr"), (NS_A, "ln")]).ok_or_else(|| invalid("missing outline", id))?;
    let fill = child(ln, NS_A, "solidFill").ok_or_else(|| invalid("outline has no color", id))?;
    let (color, _) = color_of(fill, id)?;
    Ok((color, int_attr(ln, "w")?, child(ln, NS_A, "tailEnd")))
}

fn run_spec(props: Node, id: &str) -> Result<(FontSize, bool, Color), PptxError> {
    let size = FontSize(int_attr(props, "sz")? as u32);
    let bold = matches!(props.attribute("b"), Some("1") | Some("true"));
    let fill = child(props, NS_A, "solidFill").ok_or_else(|| invalid("run has no color", id))?;
    Ok((size, bold, color_of(fill, id)?.0))
}

fn text_spec(el: Node, id: &str) -> Result<Option<TextSpec>, PptxError> {
    let Some(body) = child(el, NS_P, "txBody") else {
        return Ok(None);
    };
    let paras: Vec<Node> = body.children().filter(|c| c.has_tag_name((NS_A, "p"))).collect();
    let mut lines = Vec::with_capacity(paras.len());
    let mut props = None;
    let mut align = Align::Center;
    for (k, p) in paras.iter().enumerate() {
        let mut line = String::new();
        for r in p.children().filter(|c| c.has_tag_name((NS_A, "r"))) {
            if props.is_none() {
                props = child(r, NS_A, "rPr");
            }
            if let Some(t) = child(r, NS_A, "t") {
                line.push_str(t.text().unwrap_or(""));
            }
        }
        if k == 0 {
            align = match child(*p, NS_A, "pPr").and_then(|pp| pp.attribute("algn")) {
                Some("l") => Align::Left,
                Some("r") => Align::Right,
                _ => Align::Center,
            };
        }
        lines.push(line);
    }
    let props = props
        .or_else(|| paras.first().and_then(|p| child(*p, NS_A, "endParaRPr")))
        .ok_or_else(|| invalid("text has no run properties", id))?;
    let (font_size, bold, color) = run_spec(props, id)?;
    Ok(Some(TextSpec {
        content: lines.join("\n"),
        font_size,
        color,
        align,
        bold,
    }))
}

fn shape_kind(el: Node, id: &str) -> Result<ShapeKind, PptxError> {
    let prst = path(el, &[(NS_P, "spPr"), (NS_A, "prstGeom")])
        .and_then(|g| g.attribute("prst"))
        .ok_or_else(|| invalid("missing preset geometry", id))?;
    Ok(match prst {
        "rect" => ShapeKind::Rect,
        "roundRect" => ShapeKind::RoundedRect,
        "ellipse" => ShapeKind::Ellipse,
        "diamond" => ShapeKind::Diamond,
        "foldedCorner" => ShapeKind::FoldedCorner,
        other => return Err(invalid(&format!("unsupported geometry '{other}'"), id)),
    })
}

fn port_of(idx: i64, ellipse: bool, id: &str) -> Result<Port, PptxError> {
    let idx = if ellipse {
        if idx % 2 != 0 {
            return Err(invalid("connection site is not a side midpoint", id));
        }
        idx / 2
    } else {
        idx
    };
    Ok(match idx {
        0 => Port::Top,
        1 => Port::Left,
        2 => Port::Bottom,
        3 => Port::Right,
        _ => return Err(invalid("unknown connection site", id)),
    })
}

fn waypoints(el: Node, id: &str) -> Result<Vec<Point>, PptxError> {
    let origin = bbox(el, id)?;
    let p = path(el, &[(NS_P, "spPr"), (NS_A, "custGeom"), (NS_A, "pathLst"), (NS_A, "path")])
        .ok_or_else(|| invalid("elbow connector without a path", id))?;
    let mut pts = Vec::new();
    for step in p.children().filter(|c| c.is_element()) {
        let pt = child(step, NS_A, "pt").ok_or_else(|| invalid("path step without a point", id))?;
        pts.push(Point::new(origin.x.0 + int_attr(pt, "x")?, origin.y.0 + int_attr(pt, "y")?));
    }
    Ok(pts)
}

pub(super) fn parse(bytes: &[u8]) -> Result<ParsedArchive, PptxError> {
    let src = SlideSource::load(bytes)?;
    let canvas = src.canvas()?;
    let doc = src.document()?;
    let elements = sp_tree_elements(&doc)?;

    // asset manifest
    let mut assets = BTreeMap::new();
    let mut embed_to_asset: HashMap<String, String> = HashMap::new();
    if let Some(list) = path(doc.root_element(), &[(NS_P, "extLst")]) {
        for ext in list.children().filter(|e| e.attribute("uri") == Some(MARKER_URI)) {
            for a in ext.descendants().filter(|n| n.has_tag_name((MARKER_NS, "asset"))) {
                let id = a.attribute("id").unwrap_or_default().to_string();
                let path = a.attribute("path").unwrap_or_default().to_string();
                if let Some(rid) = a.attribute((NS_R, "embed")) {
                    embed_to_asset.insert(rid.to_string(), id.clone());
                }
                assets.insert(id, Asset { path });
            }
        }
    }

    let mut ctx = CanonCtx {
        names: HashMap::new(),
        media: src.media_hashes(),
    };
    for el in &elements {
        if let Some(c) = c_nv_pr(*el) {
            if let (Some(num), Some(name)) = (c.attribute("id"), c.attribute("name")) {
                ctx.names.insert(num.trim().to_string(), name.to_string());
            }
        }
    }

    let mut scene = Scene::new(canvas);
    scene.assets = assets;
    let mut foreign = Vec::new();
    // numeric id -> (element id, is ellipse)
    let mut numeric: HashMap<i64, (ElementId, bool)> = HashMap::new();
    let mut pending_connectors = Vec::new();

    for (ordinal, el) in elements.iter().enumerate() {
        let Some(mark) = marker(*el) else {
            let c = c_nv_pr(*el);
            foreign.push(ForeignElement {
                ordinal,
                element_type: el.tag_name().name().to_string(),
                shape_id: c.and_then(|c| c.attribute("id")).and_then(|v| v.trim().parse().ok()),
                name: c.and_then(|c| c.attribute("name")).map(str::to_string),
                hash: map_hash(&canonical_map(*el, &ctx)),
            });
            continue;
        };
        let c = c_nv_pr(*el).expect("marker lives in cNvPr");
        let raw_name = c.attribute("name").unwrap_or_default();
        let id = ElementId::new(raw_name).ok_or_else(|| PptxError::Invalid("authored element without a name".into()))?;
        let num = int_attr(c, "id")?;
        let kind = mark.attribute("kind").unwrap_or_default();
        let sid = id.as_str();
        let node_kind = match kind {
            "container" => {
                let (fill, alpha) = shape_fill(*el, sid)?;
                let (stroke, _, _) = line_props(*el, sid)?;
                NodeKind::Container {
                    title: text_spec(*el, sid)?,
                    fill,
                    stroke,
                    alpha,
                }
            }
            "block" => {
                let (fill, _) = shape_fill(*el, sid)?;
                let (stroke, _, _) = line_props(*el, sid)?;
                NodeKind::Block {
                    shape: shape_kind(*el, sid)?,
                    fill,
                    stroke,
                    label: text_spec(*el, sid)?.ok_or_else(|| invalid("block without a text body", sid))?,
                }
            }
            "text" => NodeKind::TextBox {
                text: text_spec(*el, sid)?.ok_or_else(|| invalid("text box without a text body", sid))?,
            },
            "icon" => {
                let rid = path(*el, &[(NS_P, "blipFill"), (NS_A, "blip")])
                    .and_then(|b| b.attribute((NS_R, "embed")))
                    .ok_or_else(|| invalid("picture without an image reference", sid))?;
                let asset_id = embed_to_asset
                    .get(rid)
                    .cloned()
                    .ok_or_else(|| invalid("picture references an unlisted image", sid))?;
                NodeKind::Icon { asset_id }
            }
            "connector" => {
                pending_connectors.push((*el, id, mark));
                continue;
            }
            other => return Err(invalid(&format!("unknown element kind '{other}'"), sid)),
        };
        let ellipse = matches!(
            node_kind,
            NodeKind::Block {
                shape: ShapeKind::Ellipse,
                ..
            }
        );
        numeric.insert(num, (id.clone(), ellipse));
        scene.nodes.push(SceneNode {
            bbox: bbox(*el, sid)?,
            id,
            kind: node_kind,
        });
    }

    for (el, id, mark) in pending_connectors {
        let sid = id.as_str();
        let cxn = path(el, &[(NS_P, "nvCxnSpPr"), (NS_P, "cNvCxnSpPr")]).ok_or_else(|| invalid("connector without connection", sid))?;
        let end = |tag: &str| -> Result<(ElementId, Port), PptxError> {
            let n = child(cxn, NS_A, tag).ok_or_else(|| invalid("connector end is not attached", sid))?;
            let target = int_attr(n, "id")?;
            let (eid, ellipse) = numeric
                .get(&target)
                .cloned()
                .ok_or_else(|| invalid(&format!("connector attaches to unknown shape {target}"), sid))?;
            Ok((eid, port_of(int_attr(n, "idx")?, ellipse, sid)?))
        };
        let (src, src_port) = end("stCxn")?;
        let (dst, dst_port) = end("endCxn")?;
        let spr = child(el, NS_P, "spPr").ok_or_else(|| invalid("connector without shape properties", sid))?;
        let kind = if child(spr, NS_A, "custGeom").is_some() {
            ConnectorKind::Elbow
        } else {
            match child(spr, NS_A, "prstGeom").and_then(|g| g.attribute("prst")) {
                Some("straightConnector1") | Some("line") => ConnectorKind::Straight,
                Some(p) if p.starts_with("curvedConnector") => ConnectorKind::Curve,
                Some(p) if p.starts_with("bentConnector") => ConnectorKind::Elbow,
                _ => return Err(invalid("unrecognized connector geometry", sid)),
            }
        };
        let (color, width, tail) = line_props(el, sid)?;
        let arrow_head = match tail.filter(|t| t.attribute("type").is_some_and(|v| v != "none")) {
            None => ArrowHead::None,
            Some(t) => match t.attribute("w") {
                Some("sm") => ArrowHead::Small,
                Some("lg") => ArrowHead::Large,
                _ => ArrowHead::Medium,
            },
        };
        let routed = mark.attribute("routed") != Some("0");
        let routing = routed.then(|| -> Result<Routing, PptxError> {
            Ok(Routing {
                src_port,
                dst_port,
                waypoints: if kind == ConnectorKind::Elbow {
                    waypoints(el, sid)?
                } else {
                    Vec::new()
                },
                fallback: mark.attribute("fallback") == Some("1"),
            })
        });
        scene.connectors.push(Connector {
            id,
            src,
            dst,
            kind,
            arrow_head,
            line_width: Emu(width),
            color,
            routing: routing.transpose()?,
        });
    }

    Ok(ParsedArchive { scene, foreign })
}
