use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::package::{self, write_rels, Parts, NS_R};
use super::xml::escape;
use super::{AssetSource, FigureArchive, PptxError, MARKER_NS, MARKER_URI};
use crate::geom::{Point, Rect};
use crate::router;
use crate::scene::{Align, ArrowHead, Connector, ConnectorKind, Node, NodeKind, Port, Scene, ShapeKind, TextSpec};

pub(super) const NS_A: &str = "http://schemas.openxmlformats.org/drawingml/2006/main";
pub(super) const NS_P: &str = "http://schemas.openxmlformats.org/presentationml/2006/main";

const PRES_PROPS: &str = include_str!("stubs/presProps.xml");
const LAYOUT: &str = include_str!("stubs/slideLayout1.xml");
const LAYOUT_RELS: &str = include_str!("stubs/slideLayout1.xml.rels");
const MASTER: &str = include_str!("stubs/slideMaster1.xml");
const MASTER_RELS: &str = include_str!("stubs/slideMaster1.xml.rels");
const THEME: &str = include_str!("stubs/theme1.xml");

pub(super) const SLIDE_PART: &str = "ppt/slides/slide1.xml";
pub(super) const PRESENTATION_PART: &str = "ppt/presentation.xml";

const XML_DECL: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n";

pub(super) fn prst_for(shape: ShapeKind) -> &'static str {
    match shape {
        ShapeKind::Rect => "rect",
        ShapeKind::RoundedRect => "roundRect",
        ShapeKind::Ellipse => "ellipse",
        ShapeKind::Diamond => "diamond",
        ShapeKind::FoldedCorner => "foldedCorner",
    }
}

/// Connection-site index of a port on a shape outline.
pub(super) fn site_index(port: Port, ellipse: bool) -> u32 {
    let base = match port {
        Port::Top => 0,
        Port::Left => 1,
        Port::Bottom => 2,
        Port::Right => 3,
    };
    if ellipse {
        base * 2
    } else {
        base
    }
}

pub(super) fn arrow_size(head: ArrowHead) -> Option<&'static str> {
    match head {
        ArrowHead::None => None,
        ArrowHead::Small => Some("sm"),
        ArrowHead::Medium => Some("med"),
        ArrowHead::Large => Some("lg"),
    }
}

pub(super) fn algn(align: Align) -> &'static str {
    match align {
        Align::Left => "l",
        Align::Center => "ctr",
        Align::Right => "r",
    }
}

fn marker(kind: &str, extra: &str) -> String {
    format!(
        "<a:extLst><a:ext uri=\"{MARKER_URI}\"><ff:el xmlns:ff=\"{MARKER_NS}\" kind=\"{kind}\"{extra}/></a:ext></a:extLst>"
    )
}

fn c_nv_pr(id: u32, name: &str, kind: &str, extra: &str) -> String {
    format!("<p:cNvPr id=\"{id}\" name=\"{}\">{}</p:cNvPr>", escape(name), marker(kind, extra))
}

fn xfrm(r: &Rect, flip_h: bool, flip_v: bool) -> String {
    let mut flips = String::new();
    if flip_h {
        flips.push_str(" flipH=\"1\"");
    }
    if flip_v {
        flips.push_str(" flipV=\"1\"");
    }
    format!(
        "<a:xfrm{flips}><a:off x=\"{}\" y=\"{}\"/><a:ext cx=\"{}\" cy=\"{}\"/></a:xfrm>",
        r.x.0, r.y.0, r.w.0, r.h.0
    )
}

fn solid(color: &crate::scene::Color, alpha: Option<u32>) -> String {
    match alpha {
        Some(a) if a != 100_000 => format!(
            "<a:solidFill><a:srgbClr val=\"{}\"><a:alpha val=\"{a}\"/></a:srgbClr></a:solidFill>",
            color.hex()
        ),
        _ => format!("<a:solidFill><a:srgbClr val=\"{}\"/></a:solidFill>", color.hex()),
    }
}

fn run_props(tag: &str, t: &TextSpec) -> String {
    let bold = if t.bold { " b=\"1\"" } else { " b=\"0\"" };
    format!(
        "<a:{tag} lang=\"en-US\" sz=\"{}\"{bold} dirty=\"0\">{}</a:{tag}>",
        t.font_size.0,
        solid(&t.color, None)
    )
}

fn text_body(t: &TextSpec, anchor: &str) -> String {
    let mut s = format!(
        "<p:txBody><a:bodyPr wrap=\"square\" lIns=\"45720\" tIns=\"45720\" rIns=\"45720\" bIns=\"45720\" anchor=\"{anchor}\" rtlCol=\"0\"><a:noAutofit/></a:bodyPr><a:lstStyle/>"
    );
    for line in t.content.split('\n') {
        let _ = write!(s, "<a:p><a:pPr algn=\"{}\"/>", algn(t.align));
        if !line.is_empty() {
            let _ = write!(s, "<a:r>{}<a:t>{}</a:t></a:r>", run_props("rPr", t), escape(line));
        }
        s.push_str(&run_props("endParaRPr", t));
        s.push_str("</a:p>");
    }
    s.push_str("</p:txBody>");
    s
}

fn geom(prst: &str) -> String {
    format!("<a:prstGeom prst=\"{prst}\"><a:avLst/></a:prstGeom>")
}

fn line(color: &crate::scene::Color, width: i64, tail: Option<&str>) -> String {
    let mut s = format!("<a:ln w=\"{width}\">{}", solid(color, None));
    if let Some(size) = tail {
        let _ = write!(s, "<a:tailEnd type=\"triangle\" w=\"{size}\" len=\"{size}\"/>");
    }
    s.push_str("</a:ln>");
    s
}

fn node_xml(node: &Node, num_id: u32, embeds: &BTreeMap<&str, String>) -> Result<String, PptxError> {
    let name = node.id.as_str();
    Ok(match &node.kind {
        NodeKind::Container {
            title,
            fill,
            stroke,
            alpha,
        } => {
            let mut s = format!(
                "<p:sp><p:nvSpPr>{}<p:cNvSpPr/><p:nvPr/></p:nvSpPr><p:spPr>{}{}{}{}</p:spPr>",
                c_nv_pr(num_id, name, "container", ""),
                xfrm(&node.bbox, false, false),
                geom("rect"),
                solid(fill, Some(alpha.0)),
                line(stroke, 12_700, None)
            );
            if let Some(t) = title {
                s.push_str(&text_body(t, "t"));
            }
            s.push_str("</p:sp>");
            s
        }
        NodeKind::Block {
            shape,
            fill,
            stroke,
            label,
        } => format!(
            "<p:sp><p:nvSpPr>{}<p:cNvSpPr/><p:nvPr/></p:nvSpPr><p:spPr>{}{}{}{}</p:spPr>{}</p:sp>",
            c_nv_pr(num_id, name, "block", ""),
            xfrm(&node.bbox, false, false),
            geom(prst_for(*shape)),
            solid(fill, None),
            line(stroke, 12_700, None),
            text_body(label, "ctr")
        ),
        NodeKind::TextBox { text } => format!(
            "<p:sp><p:nvSpPr>{}<p:cNvSpPr txBox=\"1\"/><p:nvPr/></p:nvSpPr><p:spPr>{}{}<a:noFill/></p:spPr>{}</p:sp>",
            c_nv_pr(num_id, name, "text", ""),
            xfrm(&node.bbox, false, false),
            geom("rect"),
            text_body(text, "ctr")
        ),
        NodeKind::Icon { asset_id } => {
            let rid = embeds
                .get(asset_id.as_str())
                .ok_or_else(|| PptxError::UnresolvedAsset {
                    id: asset_id.clone(),
                    reason: "asset is not registered in the scene".into(),
                })?;
            format!(
                "<p:pic><p:nvPicPr>{}<p:cNvPicPr><a:picLocks noChangeAspect=\"1\"/></p:cNvPicPr><p:nvPr/></p:nvPicPr><p:blipFill><a:blip r:embed=\"{rid}\"/><a:stretch><a:fillRect/></a:stretch></p:blipFill><p:spPr>{}{}</p:spPr></p:pic>",
                c_nv_pr(num_id, name, "icon", ""),
                xfrm(&node.bbox, false, false),
                geom("rect")
            )
        }
    })
}

fn bounds(points: &[Point]) -> Rect {
    let x0 = points.iter().map(|p| p.x).min().unwrap_or(0);
    let y0 = points.iter().map(|p| p.y).min().unwrap_or(0);
    let x1 = points.iter().map(|p| p.x).max().unwrap_or(0);
    let y1 = points.iter().map(|p| p.y).max().unwrap_or(0);
    Rect::new(x0, y0, x1 - x0, y1 - y0)
}

fn connector_xml(scene: &Scene, conn: &Connector, num_id: u32, ids: &BTreeMap<&str, (u32, bool)>) -> Result<String, PptxError> {
    let (routing, routed) = match (&conn.routing, conn.kind) {
        (Some(r), _) => (r.clone(), true),
        (None, ConnectorKind::Elbow) => return Err(PptxError::UnroutedElbow(conn.id.clone())),
        (None, _) => {
            let (src, dst) = match (scene.node(&conn.src), scene.node(&conn.dst)) {
                (Some(s), Some(d)) => (s.bbox, d.bbox),
                _ => return Err(PptxError::Invalid(format!("connector '{}' has a missing endpoint", conn.id))),
            };
            let (src_port, dst_port) = router::direct_ports(&src, &dst);
            let r = crate::scene::Routing {
                src_port,
                dst_port,
                waypoints: Vec::new(),
                fallback: false,
            };
            (r, false)
        }
    };
    let (src_id, src_ellipse) = *ids
        .get(conn.src.as_str())
        .ok_or_else(|| PptxError::Invalid(format!("connector '{}' has a missing endpoint", conn.id)))?;
    let (dst_id, dst_ellipse) = *ids
        .get(conn.dst.as_str())
        .ok_or_else(|| PptxError::Invalid(format!("connector '{}' has a missing endpoint", conn.id)))?;

    let mut extra = String::new();
    if routing.fallback {
        extra.push_str(" fallback=\"1\"");
    }
    if !routed {
        extra.push_str(" routed=\"0\"");
    }
    let (xfrm_xml, geometry) = match conn.kind {
        ConnectorKind::Elbow => {
            let pts = &routing.waypoints;
            let b = bounds(pts);
            let mut path = format!("<a:path w=\"{}\" h=\"{}\" fill=\"none\">", b.w.0, b.h.0);
            for (k, p) in pts.iter().enumerate() {
                let tag = if k == 0 { "moveTo" } else { "lnTo" };
                let _ = write!(path, "<a:{tag}><a:pt x=\"{}\" y=\"{}\"/></a:{tag}>", p.x - b.x.0, p.y - b.y.0);
            }
            path.push_str("</a:path>");
            let cust = format!(
                "<a:custGeom><a:avLst/><a:gdLst/><a:ahLst/><a:cxnLst/><a:rect l=\"0\" t=\"0\" r=\"r\" b=\"b\"/><a:pathLst>{path}</a:pathLst></a:custGeom>"
            );
            (xfrm(&b, false, false), cust)
        }
        ConnectorKind::Straight | ConnectorKind::Curve => {
            let src = scene.node(&conn.src).map(|n| n.bbox).unwrap_or(Rect::new(0, 0, 0, 0));
            let dst = scene.node(&conn.dst).map(|n| n.bbox).unwrap_or(Rect::new(0, 0, 0, 0));
            let a = routing.src_port.point_on(&src);
            let b = routing.dst_port.point_on(&dst);
            let prst = if conn.kind == ConnectorKind::Straight {
                "straightConnector1"
            } else {
                "curvedConnector3"
            };
            (xfrm(&bounds(&[a, b]), b.x < a.x, b.y < a.y), geom(prst))
        }
    };
    Ok(format!(
        "<p:cxnSp><p:nvCxnSpPr>{}<p:cNvCxnSpPr><a:stCxn id=\"{src_id}\" idx=\"{}\"/><a:endCxn id=\"{dst_id}\" idx=\"{}\"/></p:cNvCxnSpPr><p:nvPr/></p:nvCxnSpPr><p:spPr>{xfrm_xml}{geometry}{}</p:spPr></p:cxnSp>",
        c_nv_pr(num_id, conn.id.as_str(), "connector", &extra),
        site_index(routing.src_port, src_ellipse),
        site_index(routing.dst_port, dst_ellipse),
        line(&conn.color, conn.line_width.0, arrow_size(conn.arrow_head))
    ))
}

fn slide_xml(scene: &Scene, embeds: &BTreeMap<&str, String>) -> Result<String, PptxError> {
    let mut ids: BTreeMap<&str, (u32, bool)> = BTreeMap::new();
    let mut next = 2u32;
    let mut shapes = String::new();
    for node in &scene.nodes {
        let ellipse = matches!(
            node.kind,
            NodeKind::Block {
                shape: ShapeKind::Ellipse,
                ..
            }
        );
        ids.insert(node.id.as_str(), (next, ellipse));
        shapes.push_str(&node_xml(node, next, embeds)?);
        next += 1;
    }
    for conn in &scene.connectors {
        shapes.push_str(&connector_xml(scene, conn, next, &ids)?);
        next += 1;
    }
    let mut assets = String::new();
    if !scene.assets.is_empty() {
        let _ = write!(assets, "<p:extLst><p:ext uri=\"{MARKER_URI}\"><ff:assets xmlns:ff=\"{MARKER_NS}\">");
        for (id, asset) in &scene.assets {
            let _ = write!(
                assets,
                "<ff:asset id=\"{}\" path=\"{}\" r:embed=\"{}\"/>",
                escape(id),
                escape(&asset.path),
                embeds[id.as_str()]
            );
        }
        assets.push_str("</ff:assets></p:ext></p:extLst>");
    }
    Ok(format!(
        "{XML_DECL}<p:sld xmlns:a=\"{NS_A}\" xmlns:r=\"{NS_R}\" xmlns:p=\"{NS_P}\"><p:cSld><p:spTree><p:nvGrpSpPr><p:cNvPr id=\"1\" name=\"\"/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr><p:grpSpPr><a:xfrm><a:off x=\"0\" y=\"0\"/><a:ext cx=\"0\" cy=\"0\"/><a:chOff x=\"0\" y=\"0\"/><a:chExt cx=\"0\" cy=\"0\"/></a:xfrm></p:grpSpPr>{shapes}</p:spTree></p:cSld><p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr>{assets}</p:sld>"
    ))
}

fn presentation_xml(scene: &Scene) -> String {
    format!(
        "{XML_DECL}<p:presentation xmlns:a=\"{NS_A}\" xmlns:r=\"{NS_R}\" xmlns:p=\"{NS_P}\" saveSubsetFonts=\"1\"><p:sldMasterIdLst><p:sldMasterId id=\"2147483648\" r:id=\"rId1\"/></p:sldMasterIdLst><p:sldIdLst><p:sldId id=\"256\" r:id=\"rId2\"/></p:sldIdLst><p:sldSz cx=\"{}\" cy=\"{}\"/><p:notesSz cx=\"6858000\" cy=\"9144000\"/></p:presentation>",
        scene.canvas.width.0, scene.canvas.height.0
    )
}

fn content_types(media: bool) -> String {
    let mut s = format!("{XML_DECL}<Types xmlns=\"{}\">", package::NS_CT);
    s.push_str("<Default Extension=\"rels\" ContentType=\"application/vnd.openxmlformats-package.relationships+xml\"/>");
    s.push_str("<Default Extension=\"xml\" ContentType=\"application/xml\"/>");
    if media {
        s.push_str("<Default Extension=\"png\" ContentType=\"image/png\"/>");
    }
    for (part, ty) in [
        (PRESENTATION_PART, "application/vnd.openxmlformats-officedocument.presentationml.presentation.main+xml"),
        ("ppt/presProps.xml", "application/vnd.openxmlformats-officedocument.presentationml.presProps+xml"),
        (SLIDE_PART, "application/vnd.openxmlformats-officedocument.presentationml.slide+xml"),
        ("ppt/slideLayouts/slideLayout1.xml", "application/vnd.openxmlformats-officedocument.presentationml.slideLayout+xml"),
        ("ppt/slideMasters/slideMaster1.xml", "application/vnd.openxmlformats-officedocument.presentationml.slideMaster+xml"),
        ("ppt/theme/theme1.xml", "application/vnd.openxmlformats-officedocument.theme+xml"),
    ] {
        let _ = write!(s, "<Override PartName=\"/{part}\" ContentType=\"{ty}\"/>");
    }
    s.push_str("</Types>");
    s
}

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

pub(super) fn emit(scene: &Scene, assets: &dyn AssetSource) -> Result<FigureArchive, PptxError> {
    // media parts in asset-id order
    let mut embeds: BTreeMap<&str, String> = BTreeMap::new();
    let mut media: Vec<(String, Vec<u8>)> = Vec::new();
    for (k, (id, asset)) in scene.assets.iter().enumerate() {
        let bytes = assets.load(id, &asset.path).map_err(|reason| PptxError::UnresolvedAsset {
            id: id.clone(),
            reason,
        })?;
        if !bytes.starts_with(PNG_SIGNATURE) {
            return Err(PptxError::UnresolvedAsset {
                id: id.clone(),
                reason: format!("'{}' is not a PNG image", asset.path),
            });
        }
        embeds.insert(id.as_str(), format!("rId{}", k + 2));
        media.push((format!("ppt/media/image{}.png", k + 1), bytes));
    }

    let slide = slide_xml(scene, &embeds)?;
    let mut slide_rels: Vec<(&str, &str, String)> =
        vec![("rId1", package::REL_LAYOUT, "../slideLayouts/slideLayout1.xml".to_string())];
    let rids: Vec<String> = (0..media.len()).map(|k| format!("rId{}", k + 2)).collect();
    for (k, rid) in rids.iter().enumerate() {
        slide_rels.push((rid.as_str(), package::REL_IMAGE, format!("../media/image{}.png", k + 1)));
    }

    let mut parts: Parts = vec![
        (package::CONTENT_TYPES.into(), content_types(!media.is_empty()).into_bytes()),
        (
            "_rels/.rels".into(),
            write_rels(&[("rId1", package::REL_OFFICE_DOC, PRESENTATION_PART.to_string())]).into_bytes(),
        ),
        (PRESENTATION_PART.into(), presentation_xml(scene).into_bytes()),
        (
            "ppt/_rels/presentation.xml.rels".into(),
            write_rels(&[
                ("rId1", package::REL_MASTER, "slideMasters/slideMaster1.xml".into()),
                ("rId2", package::REL_SLIDE, "slides/slide1.xml".into()),
                ("rId3", package::REL_PRES_PROPS, "presProps.xml".into()),
                ("rId4", package::REL_THEME, "theme/theme1.xml".into()),
            ])
            .into_bytes(),
        ),
        ("ppt/presProps.xml".into(), PRES_PROPS.as_bytes().to_vec()),
        (SLIDE_PART.into(), slide.into_bytes()),
        ("ppt/slides/_rels/slide1.xml.rels".into(), write_rels(&slide_rels).into_bytes()),
        ("ppt/slideLayouts/slideLayout1.xml".into(), LAYOUT.as_bytes().to_vec()),
        ("ppt/slideLayouts/_rels/slideLayout1.xml.rels".into(), LAYOUT_RELS.as_bytes().to_vec()),
        ("ppt/slideMasters/slideMaster1.xml".into(), MASTER.as_bytes().to_vec()),
        ("ppt/slideMasters/_rels/slideMaster1.xml.rels".into(), MASTER_RELS.as_bytes().to_vec()),
        ("ppt/theme/theme1.xml".into(), THEME.as_bytes().to_vec()),
    ];
    parts.extend(media);
    Ok(FigureArchive {
        bytes: package::write_zip(&parts)?,
    })
}
