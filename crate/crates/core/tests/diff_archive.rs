mod oracle;

use figforge_core::diff::{diff_report, edit_distance, EditKind, Side};
use figforge_core::pptx::emit_with;
use figforge_core::{BlockStyle, ConnectorKind, ConnectorStyle, Rect, RouterConfig, Scene, TextSpec};
use oracle::gen::random_scene;
use oracle::session::{self, Edit};
use oracle::surgery::{append_to_tree, edit_text, human_shape, SLIDE};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn base() -> Vec<u8> {
    let mut s = Scene::default();
    let a = s.add_block(Rect::from_inches(1.0, 1.0, 1.5, 0.75), "Encoder", BlockStyle::default()).unwrap();
    let b = s.add_block(Rect::from_inches(4.0, 1.0, 1.5, 0.75), "Decoder", BlockStyle::default()).unwrap();
    s.add_text(Rect::from_inches(1.0, 3.0, 2.0, 0.5), TextSpec::new("note"), Some("note")).unwrap();
    s.add_connector(&a, &b, ConnectorKind::Elbow, ConnectorStyle::default()).unwrap();
    let s = figforge_core::route_all(&s, &RouterConfig::default());
    figforge_core::pptx::emit(&s).unwrap().bytes
}

#[test]
fn identity_is_zero() {
    let a = base();
    let r = edit_distance(&a, &a).unwrap();
    assert_eq!(r.distance, 0);
    assert_eq!(diff_report(&r), "distance: 0\n");
}

#[test]
fn recolor_and_move_one_block_is_one_modify() {
    let a = base();
    let b = session::apply(&a, "e1", Edit::Recolor, 1).unwrap();
    let b = session::apply(&b, "e1", Edit::Move, 2).unwrap();
    let r = edit_distance(&a, &b).unwrap();
    assert_eq!(r.distance, 1);
    assert_eq!(r.ops[0].kind, EditKind::Modify);
    assert_eq!(r.ops[0].element_id, "e1");
    assert_eq!(r.ops[0].changed_attrs, vec!["position", "fill"]);
    assert!(diff_report(&r).contains("modify e1 (sp): position, fill"));
}

#[test]
fn delete_text_and_add_shape_is_two() {
    let a = base();
    let b = session::apply(&a, "note", Edit::Delete, 0).unwrap();
    let b = append_to_tree(&b, &human_shape(40, "Rectangle 39", 0, "FF0000"));
    let r = edit_distance(&a, &b).unwrap();
    assert_eq!(r.distance, 2);
    assert_eq!(r.ops[0].kind, EditKind::Delete);
    assert_eq!(r.ops[0].element_id, "note");
    assert_eq!(r.ops[1].kind, EditKind::Add);
    assert!(r.ops[1].element_id.starts_with("sp:"));

    let back = edit_distance(&b, &a).unwrap();
    assert_eq!(back.distance, 2);
    assert_eq!(back.ops[0].kind, EditKind::Delete);
    assert_eq!(back.ops[0].element_id, r.ops[1].element_id);
    assert_eq!(back.ops[1].element_id, "note");
}

#[test]
fn two_identical_foreign_shapes_match_by_ordinal() {
    let a = base();
    let shape = human_shape(50, "Rectangle", 0, "00FF00");
    let one = append_to_tree(&a, &shape);
    let two = append_to_tree(&one, &human_shape(51, "Rectangle", 0, "00FF00"));
    let r = edit_distance(&one, &two).unwrap();
    assert_eq!(r.distance, 1);
    assert!(r.ops[0].element_id.ends_with(":1"));
}

#[test]
fn text_edit_counts_as_modify() {
    let a = base();
    let b = session::apply(&a, "note", Edit::Retext, 0).unwrap();
    let r = edit_distance(&a, &b).unwrap();
    assert_eq!(r.distance, 1);
    assert_eq!(r.ops[0].changed_attrs, vec!["text"]);
}

#[test]
fn bring_to_front_is_one_modify() {
    let a = base();
    let b = edit_text(&a, SLIDE, |x| {
        let (s, e) = session::element_span(&x, "e1").unwrap();
        let frag = x[s..e].to_string();
        let rest = format!("{}{}", &x[..s], &x[e..]);
        rest.replacen("</p:spTree>", &format!("{frag}</p:spTree>"), 1)
    });
    let r = edit_distance(&a, &b).unwrap();
    assert_eq!(r.distance, 1);
    assert_eq!(r.ops[0].element_id, "e1");
    assert_eq!(r.ops[0].changed_attrs, vec!["z_order"]);
}

#[test]
fn renumbering_shape_ids_is_not_an_edit() {
    let a = base();
    let b = edit_text(&a, SLIDE, |x| {
        x.replace("id=\"2\"", "id=\"102\"")
            .replace("id=\"3\"", "id=\"103\"")
            .replace("stCxn id=\"2\"", "stCxn id=\"102\"")
    });
    assert_eq!(edit_distance(&a, &b).unwrap().distance, 0);
}

#[test]
fn unparsable_side_is_named() {
    let a = base();
    let e = edit_distance(&a, b"junk").unwrap_err();
    assert_eq!(e.side, Side::After);
    let e = edit_distance(b"junk", &a).unwrap_err();
    assert_eq!(e.side, Side::Before);
    assert!(e.to_string().contains("before"));
}

#[test]
fn json_report_shape() {
    let a = base();
    let b = session::apply(&a, "e2", Edit::Resize, 0).unwrap();
    let r = edit_distance(&a, &b).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["distance"], 1);
    assert_eq!(v["ops"][0]["kind"], "modify");
    assert_eq!(v["ops"][0]["changed_attrs"][0], "size");
}

fn emitted(seed: u64, n: usize) -> (Scene, Vec<u8>) {
    let (scene, assets) = random_scene(&mut ChaCha8Rng::seed_from_u64(seed), n);
    let bytes = emit_with(&scene, &assets).unwrap().bytes;
    (scene, bytes)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn session_distance_counts_touched_elements(seed in any::<u64>(), n in 5usize..40, repeat in any::<bool>()) {
        let (scene, bytes) = emitted(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let k = rng.gen_range(1..=10.min(scene.element_count()));
        let s = session::run(&mut rng, &scene, &bytes, k, repeat);
        let r = edit_distance(&bytes, &s.bytes).unwrap();
        prop_assert_eq!(r.distance, s.touched.len(), "{}", diff_report(&r));
        prop_assert_eq!(edit_distance(&s.bytes, &s.bytes).unwrap().distance, 0);
    }

    #[test]
    fn distance_is_symmetric(seed in any::<u64>(), n in 5usize..30) {
        let (scene, bytes) = emitted(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = session::run(&mut rng, &scene, &bytes, 4.min(scene.element_count()), false);
        let ab = edit_distance(&bytes, &s.bytes).unwrap();
        let ba = edit_distance(&s.bytes, &bytes).unwrap();
        prop_assert_eq!(ab.distance, ba.distance);
        let swap = |k| match k { EditKind::Add => EditKind::Delete, EditKind::Delete => EditKind::Add, k => k };
        let mut flipped: Vec<_> = ab.ops.iter().map(|o| (swap(o.kind), o.element_id.clone())).collect();
        let mut other: Vec<_> = ba.ops.iter().map(|o| (o.kind, o.element_id.clone())).collect();
        flipped.sort();
        other.sort();
        prop_assert_eq!(flipped, other);
    }

    #[test]
    fn disjoint_sessions_add_up(seed in any::<u64>(), n in 10usize..40) {
        let (scene, a) = emitted(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let first = session::run(&mut rng, &scene, &a, 2, false);
        // second session on elements the first did not touch; nodes a touched
        // connector refers to stay out so no deletion can reach them
        let touched_conn: Vec<_> = scene.connectors.iter().filter(|c| first.touched.contains(c.id.as_str())).collect();
        let mut narrowed = scene.clone();
        narrowed.nodes.retain(|x| {
            !first.touched.contains(x.id.as_str()) && !touched_conn.iter().any(|c| c.src == x.id || c.dst == x.id)
        });
        narrowed.connectors.retain(|c| !first.touched.contains(c.id.as_str()));
        let second = session::run(&mut rng, &narrowed, &first.bytes, 2.min(narrowed.element_count()), false);
        prop_assume!(first.touched.is_disjoint(&second.touched));
        let ab = edit_distance(&a, &first.bytes).unwrap().distance;
        let bc = edit_distance(&first.bytes, &second.bytes).unwrap().distance;
        let ac = edit_distance(&a, &second.bytes).unwrap().distance;
        prop_assert_eq!(ac, ab + bc);
    }
}
