use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use figforge_bench::{lattice, records};
use figforge_core::kb::{query, HashEmbedder, IndexName, KnowledgeBase};
use figforge_core::pptx::{emit, parse};
use figforge_core::render::render_svg;
use figforge_core::{edit_distance, parse_blueprint, route_all, run_lints, serialize_blueprint, RouterConfig};

fn bench(c: &mut Criterion) {
    let scene = lattice(7, 5);
    let dsl = serialize_blueprint(&scene).unwrap();
    let bytes = emit(&scene).unwrap().bytes;
    let other = emit(&lattice(7, 4)).unwrap().bytes;

    c.bench_function("route_all 7x5 lattice", |b| b.iter(|| route_all(black_box(&scene), &RouterConfig::default())));
    c.bench_function("parse_blueprint", |b| b.iter(|| parse_blueprint(black_box(&dsl)).unwrap()));
    c.bench_function("emit", |b| b.iter(|| emit(black_box(&scene)).unwrap()));
    c.bench_function("parse archive", |b| b.iter(|| parse(black_box(&bytes)).unwrap()));
    c.bench_function("render_svg", |b| b.iter(|| render_svg(black_box(&scene)).unwrap()));
    c.bench_function("run_lints", |b| b.iter(|| run_lints(black_box(&scene))));
    c.bench_function("edit_distance", |b| b.iter(|| edit_distance(black_box(&bytes), black_box(&other)).unwrap()));

    let e = HashEmbedder::default();
    let kb = KnowledgeBase::build(records(5000), &e).unwrap();
    c.bench_function("kb query 5000", |b| {
        b.iter(|| query(kb.by_name(IndexName::Hybrid), black_box("graph encoder feeds a robot policy"), 3, &e).unwrap())
    });
}

criterion_group!(benches, bench);
criterion_main!(benches);
