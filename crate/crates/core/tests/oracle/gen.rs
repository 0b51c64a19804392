//! Seeded random fixtures.

use std::collections::BTreeMap;

use figforge_core::pptx::MemoryAssets;
use figforge_core::{
    router, ArrowHead, BlockStyle, Color, ConnectorKind, ConnectorStyle, ContainerStyle, Scene, ShapeKind, TextSpec,
};
use figforge_core::Rect;
use rand::Rng;

pub const CELL: i64 = 114_300;

pub struct RoutingCase {
    pub canvas_w: i64,
    pub canvas_h: i64,
    pub src: Rect,
    pub dst: Rect,
    pub obstacles: Vec<Rect>,
}

fn random_box<R: Rng>(rng: &mut R, cols: i64, rows: i64) -> Rect {
    // quarter-cell resolution so ports usually sit off the pitch lines
    let q = CELL / 4;
    let w = rng.gen_range(4..=16) * q;
    let h = rng.gen_range(4..=12) * q;
    let x = rng.gen_range(0..=(cols * 4 - w / q)) * q;
    let y = rng.gen_range(0..=(rows * 4 - h / q)) * q;
    Rect::new(x, y, w, h)
}

/// Two endpoint boxes plus up to `max_obstacles` obstacles, none of which
/// overlaps an endpoint, on a `cols` x `rows` cell canvas.
pub fn routing_case<R: Rng>(rng: &mut R, cols: i64, rows: i64, max_obstacles: usize) -> RoutingCase {
    let src = random_box(rng, cols, rows);
    let dst = loop {
        let d = random_box(rng, cols, rows);
        if !d.interiors_overlap(&src) {
            break d;
        }
    };
    let n = rng.gen_range(0..=max_obstacles);
    let mut obstacles = Vec::new();
    let mut attempts = 0;
    while obstacles.len() < n && attempts < 200 {
        attempts += 1;
        let o = random_box(rng, cols, rows);
        if !o.interiors_overlap(&src) && !o.interiors_overlap(&dst) {
            obstacles.push(o);
        }
    }
    RoutingCase {
        canvas_w: cols * CELL,
        canvas_h: rows * CELL,
        src,
        dst,
        obstacles,
    }
}

/// A 2x2 opaque PNG of one color.
pub fn tiny_png(rgb: [u8; 3]) -> Vec<u8> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, 2, 2);
        enc.set_color(png::ColorType::Rgba);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header().unwrap();
        let px = [rgb[0], rgb[1], rgb[2], 255];
        w.write_image_data(&px.repeat(4)).unwrap();
    }
    out
}

const WORDS: &[&str] = &[
    "Encoder", "Decoder", "Attention", "x & y", "<input>", "\"quoted\"", "it's", "  padded  ", "Loss", "Σ-sum", "Layer Norm",
];

fn text<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(1..=4);
    let mut parts: Vec<String> = (0..n).map(|_| WORDS[rng.gen_range(0..WORDS.len())].to_string()).collect();
    if rng.gen_bool(0.2) {
        parts.insert(1.min(parts.len()), "\n".into());
    }
    parts.join(" ")
}

fn color<R: Rng>(rng: &mut R) -> Color {
    Color([rng.gen(), rng.gen(), rng.gen()])
}

fn grid_box<R: Rng>(rng: &mut R, canvas: &Rect, max_w: i64, max_h: i64) -> Rect {
    let step = 45_720; // 0.05 in
    let w = rng.gen_range(4..=max_w / step) * step;
    let h = rng.gen_range(4..=max_h / step) * step;
    let x = rng.gen_range(0..=(canvas.w.0 - w) / step) * step;
    let y = rng.gen_range(0..=(canvas.h.0 - h) / step) * step;
    Rect::new(x, y, w, h)
}

/// Validator-clean routed scene with `n` elements (nodes plus connectors),
/// and the asset bytes its icons need.
pub fn random_scene<R: Rng>(rng: &mut R, n: usize) -> (Scene, MemoryAssets) {
    let mut scene = Scene::default();
    let canvas = scene.canvas.rect();
    let mut bytes = BTreeMap::new();
    for k in 0..2 {
        let id = format!("icon{k}");
        scene.add_asset(id.clone(), format!("assets/{id}.png")).unwrap();
        bytes.insert(id, tiny_png([40 * k as u8, 120, 200]));
    }

    let n_conn = n / 4;
    let n_nodes = (n - n_conn).max(2);
    let n_containers = (n_nodes / 6).min(4);

    let mut containers: Vec<Rect> = (0..n_containers)
        .map(|_| grid_box(rng, &canvas, 4_572_000, 3_657_600))
        .collect();
    containers.sort_by_key(|r| std::cmp::Reverse(r.w.0 * r.h.0));
    for r in containers {
        let style = ContainerStyle {
            title: rng.gen_bool(0.6).then(|| text(rng)),
            fill: color(rng),
            stroke: color(rng),
            alpha: [1.0, 0.5, 0.25, 0.8][rng.gen_range(0..4)],
            ..Default::default()
        };
        scene.add_container(r, style).unwrap();
    }
    let mut nodes = Vec::new();
    for _ in n_containers..n_nodes {
        let r = grid_box(rng, &canvas, 1_828_800, 914_400);
        let id = match rng.gen_range(0..10) {
            0..=5 => {
                let style = BlockStyle {
                    shape: ShapeKind::ALL[rng.gen_range(0..ShapeKind::ALL.len())],
                    fill: color(rng),
                    stroke: color(rng),
                    font_size: [10.0, 12.0, 14.0, 10.5, 18.0][rng.gen_range(0..5)],
                    font_color: color(rng),
                    bold: rng.gen(),
                    id: rng.gen_bool(0.3).then(|| format!("blk_{}", nodes.len())),
                };
                let label = if rng.gen_bool(0.1) { String::new() } else { text(rng) };
                scene.add_block(r, &label, style).unwrap()
            }
            6..=8 => {
                let t = TextSpec::new(text(rng))
                    .size([8.0, 9.5, 12.0, 14.0][rng.gen_range(0..4)])
                    .color(color(rng))
                    .align(figforge_core::Align::ALL[rng.gen_range(0..3)])
                    .bold(rng.gen());
                scene.add_text(r, t, None).unwrap()
            }
            _ => {
                let asset = format!("icon{}", rng.gen_range(0..2));
                scene.add_icon(&asset, r, None).unwrap()
            }
        };
        nodes.push(id);
    }
    for _ in 0..n_conn {
        if nodes.len() < 2 {
            break;
        }
        let a = rng.gen_range(0..nodes.len());
        let mut b = rng.gen_range(0..nodes.len() - 1);
        if b >= a {
            b += 1;
        }
        let style = ConnectorStyle {
            arrow_head: ArrowHead::ALL[rng.gen_range(0..4)],
            line_width_pt: [1.0, 1.5, 1.75, 2.0, 3.0][rng.gen_range(0..5)],
            color: color(rng),
            id: None,
        };
        let kind = ConnectorKind::ALL[rng.gen_range(0..3)];
        let (na, nb) = (nodes[a].clone(), nodes[b].clone());
        scene.add_connector(&na, &nb, kind, style).unwrap();
    }
    let scene = router::route_all(&scene, &router::RouterConfig::default());
    assert!(scene.validate().is_empty(), "{:?}", scene.validate());
    (scene, MemoryAssets(bytes))
}
