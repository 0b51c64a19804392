//! Scripted human edit sessions applied straight to the slide XML.

use std::collections::BTreeSet;

use figforge_core::{NodeKind, Scene};
use rand::seq::SliceRandom;
use rand::Rng;

use super::surgery::{edit_text, human_shape, read_text, SLIDE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edit {
    Recolor,
    Move,
    Resize,
    Retext,
    Delete,
}

/// Byte span of the top-level element whose cNvPr carries `name`.
pub fn element_span(xml: &str, name: &str) -> Option<(usize, usize)> {
    let needle = format!(" name=\"{name}\"");
    let at = xml.match_indices(&needle).map(|(i, _)| i).find(|&i| {
        let rest = &xml[i + needle.len()..];
        rest.starts_with('>') || rest.starts_with("/>")
    })?;
    let (start, tag) = ["<p:sp>", "<p:cxnSp>", "<p:pic>"]
        .iter()
        .filter_map(|t| xml[..at].rfind(t).map(|i| (i, *t)))
        .max()?;
    let close = format!("</{}", &tag[1..]);
    let end = at + xml[at..].find(&close)? + close.len();
    Some((start, end))
}

fn bump_int_after(s: &str, marker: &str, by: i64) -> Option<String> {
    let i = s.find(marker)? + marker.len();
    let j = i + s[i..].find('"')?;
    let v: i64 = s[i..j].parse().ok()?;
    Some(format!("{}{}{}", &s[..i], v + by, &s[j..]))
}

/// Applies one edit to a fragment, returning None when the edit does not
/// apply to this element.
fn edit_fragment(frag: &str, edit: Edit, step: usize) -> Option<String> {
    match edit {
        Edit::Recolor => {
            let m = "srgbClr val=\"";
            let i = frag.find(m)? + m.len();
            let old = &frag[i..i + 6];
            let mut new = format!("{:06X}", (0x13579B + step * 0x010203) & 0xFFFFFF);
            if new == old {
                new = "ABCDEF".into();
            }
            Some(format!("{}{}{}", &frag[..i], new, &frag[i + 6..]))
        }
        Edit::Move => bump_int_after(frag, "<a:off x=\"", 12_700),
        Edit::Resize => bump_int_after(frag, "<a:ext cx=\"", 12_700),
        Edit::Retext => {
            let i = frag.find("<a:t>")? + 5;
            Some(format!("{}x{}", &frag[..i], &frag[i..]))
        }
        Edit::Delete => Some(String::new()),
    }
}

pub fn apply(bytes: &[u8], name: &str, edit: Edit, step: usize) -> Option<Vec<u8>> {
    let xml = read_text(bytes, SLIDE);
    let (s, e) = element_span(&xml, name)?;
    let new = edit_fragment(&xml[s..e], edit, step)?;
    Some(edit_text(bytes, SLIDE, |x| format!("{}{}{}", &x[..s], new, &x[e..])))
}

pub struct Session {
    pub bytes: Vec<u8>,
    pub touched: BTreeSet<String>,
    pub edits: usize,
}

/// Touches `k` distinct elements of `scene` (emitted as `bytes`). With
/// `repeat`, one element gets several stacked edits. Deletions only hit
/// elements no connector refers to, and some touches add a new foreign
/// shape instead.
pub fn run<R: Rng>(rng: &mut R, scene: &Scene, bytes: &[u8], k: usize, repeat: bool) -> Session {
    let referenced: BTreeSet<String> = scene
        .connectors
        .iter()
        .flat_map(|c| [c.src.to_string(), c.dst.to_string()])
        .collect();
    let mut names: Vec<String> = scene
        .nodes
        .iter()
        .map(|n| n.id.to_string())
        .chain(scene.connectors.iter().map(|c| c.id.to_string()))
        .collect();
    names.shuffle(rng);
    let icons: BTreeSet<String> = scene
        .nodes
        .iter()
        .filter(|n| matches!(n.kind, NodeKind::Icon { .. }))
        .map(|n| n.id.to_string())
        .collect();

    let mut cur = bytes.to_vec();
    let mut touched = BTreeSet::new();
    let mut edits = 0;
    let mut step = 0;
    let mut next_foreign = 9000;
    for name in names.into_iter() {
        if touched.len() == k {
            break;
        }
        step += 1;
        if rng.gen_bool(0.15) {
            let shape = human_shape(next_foreign, &format!("Rectangle {next_foreign}"), 12_700 * step as i64, "4472C4");
            cur = super::surgery::append_to_tree(&cur, &shape);
            touched.insert(format!("foreign {next_foreign}"));
            next_foreign += 1;
            edits += 1;
            if touched.len() == k {
                break;
            }
        }
        let times = if repeat && touched.is_empty() { rng.gen_range(2..=5) } else { 1 };
        let mut done = false;
        for _ in 0..times {
            let mut pool = vec![Edit::Move, Edit::Resize];
            if !icons.contains(&name) {
                pool.extend([Edit::Recolor, Edit::Retext]);
            }
            if !referenced.contains(&name) && times == 1 && rng.gen_bool(0.2) {
                pool = vec![Edit::Delete];
            }
            pool.shuffle(rng);
            for edit in pool {
                step += 1;
                if let Some(next) = apply(&cur, &name, edit, step) {
                    cur = next;
                    done = true;
                    edits += 1;
                    break;
                }
            }
        }
        if done {
            touched.insert(name);
        }
    }
    Session {
        bytes: cur,
        touched,
        edits,
    }
}
