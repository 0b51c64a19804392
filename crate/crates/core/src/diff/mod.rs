//! Edit distance between two presentation archives.
//!
//! Elements of the slide shape tree are keyed, matched across the two sides
//! and compared as canonical maps. Each matched element whose map or
//! relative z-position differs is one Modify, however many attributes moved.

pub mod canonical;

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use roxmltree::Node;
use serde::{Deserialize, Serialize};

pub use canonical::{canonical_map, canonicalize_element, group_of, map_hash, CanonCtx, CanonicalMap};

use crate::pptx::parse::{c_nv_pr, marker, sp_tree_elements, SlideSource};
use crate::pptx::PptxError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditKind {
    Delete,
    Modify,
    Add,
}

impl EditKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EditKind::Delete => "delete",
            EditKind::Modify => "modify",
            EditKind::Add => "add",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditOp {
    pub kind: EditKind,
    /// Authored element name, or `type:hash:ordinal` for foreign elements.
    pub element_id: String,
    pub element_type: String,
    /// Attribute groups that differ; Modify only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub changed_attrs: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditDistanceReport {
    pub distance: usize,
    pub ops: Vec<EditOp>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Before,
    After,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Before => "before",
            Side::After => "after",
        })
    }
}

#[derive(Debug, thiserror::Error)]
#[error("cannot read the {side} archive: {source}")]
pub struct DiffError {
    pub side: Side,
    #[source]
    pub source: PptxError,
}

const GROUP_ORDER: &[&str] = &[
    "connection", "position", "size", "geometry", "line", "text", "font", "fill", "name", "z_order", "other",
];

struct Keyed {
    key: String,
    element_type: String,
    map: CanonicalMap,
}

fn keyed_elements(bytes: &[u8]) -> Result<Vec<Keyed>, PptxError> {
    let src = SlideSource::load(bytes)?;
    let doc = src.document()?;
    let elements: Vec<Node> = sp_tree_elements(&doc)?;
    let mut ctx = CanonCtx {
        names: HashMap::new(),
        media: src.media_hashes(),
    };
    for el in &elements {
        if let Some(c) = c_nv_pr(*el) {
            if let (Some(num), Some(name)) = (c.attribute("id"), c.attribute("name")) {
                ctx.names.entry(num.trim().to_string()).or_insert_with(|| name.to_string());
            }
        }
    }

    let mut authored: BTreeSet<String> = BTreeSet::new();
    let mut ordinals: HashMap<(String, String), usize> = HashMap::new();
    let mut out = Vec::with_capacity(elements.len());
    for el in &elements {
        let element_type = el.tag_name().name().to_string();
        let map = canonical_map(*el, &ctx);
        let name = marker(*el)
            .and_then(|_| c_nv_pr(*el))
            .and_then(|c| c.attribute("name"))
            .filter(|n| !n.is_empty());
        let key = match name {
            // a copied authored shape keeps its marker and often its name
            Some(n) if authored.insert(n.to_string()) => n.to_string(),
            _ => {
                let hash = map_hash(&map);
                let k = ordinals.entry((element_type.clone(), hash.clone())).or_insert(0);
                let key = format!("{element_type}:{hash}:{k}");
                *k += 1;
                key
            }
        };
        out.push(Keyed { key, element_type, map });
    }
    Ok(out)
}

fn changed_groups(a: &CanonicalMap, b: &CanonicalMap) -> BTreeSet<&'static str> {
    let mut groups = BTreeSet::new();
    for (k, v) in a {
        if b.get(k) != Some(v) {
            groups.insert(group_of(k));
        }
    }
    for k in b.keys() {
        if !a.contains_key(k) {
            groups.insert(group_of(k));
        }
    }
    groups
}

/// Longest increasing subsequence of `perm` restricted by `forced`
/// (Some(true) must be kept, Some(false) must not). Returns its length, or
/// None when the constraints admit no chain containing every forced element.
fn constrained_lis(perm: &[usize], forced: &[Option<bool>]) -> Option<usize> {
    let n = perm.len();
    let must: Vec<usize> = (0..n).filter(|&i| forced[i] == Some(true)).collect();
    let skips_must = |lo: Option<usize>, hi: Option<usize>| {
        must.iter()
            .any(|&k| lo.is_none_or(|l| k > l) && hi.is_none_or(|h| k < h))
    };
    let mut best: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        if forced[i] == Some(false) {
            continue;
        }
        let mut b = if skips_must(None, Some(i)) { None } else { Some(1) };
        for j in 0..i {
            if let Some(dj) = best[j] {
                if perm[j] < perm[i] && !skips_must(Some(j), Some(i)) {
                    b = b.max(Some(dj + 1));
                }
            }
        }
        best[i] = b;
    }
    let ends = (0..n).filter(|&i| !skips_must(Some(i), None)).filter_map(|i| best[i]).max();
    match ends {
        Some(len) => Some(len),
        None if must.is_empty() => Some(0),
        None => None,
    }
}

/// Elements that changed relative order. The kept set is a largest set whose
/// order agrees on both sides; among those, the one that keeps the smallest
/// keys, so the choice does not depend on which side is "before".
fn moved(before_order: &[&str], after_pos: &HashMap<&str, usize>) -> BTreeSet<String> {
    let perm: Vec<usize> = before_order.iter().map(|k| after_pos[k]).collect();
    let n = perm.len();
    if perm.windows(2).all(|w| w[0] < w[1]) {
        return BTreeSet::new();
    }
    let mut forced = vec![None; n];
    let target = constrained_lis(&perm, &forced).unwrap_or(0);
    let mut by_key: Vec<usize> = (0..n).collect();
    by_key.sort_by_key(|&i| before_order[i]);
    for i in by_key {
        forced[i] = Some(true);
        if constrained_lis(&perm, &forced) != Some(target) {
            forced[i] = Some(false);
        }
    }
    (0..n)
        .filter(|&i| forced[i] == Some(false))
        .map(|i| before_order[i].to_string())
        .collect()
}

fn diff_elements(before: &[Keyed], after: &[Keyed]) -> EditDistanceReport {
    let after_idx: HashMap<&str, usize> = after.iter().enumerate().map(|(k, e)| (e.key.as_str(), k)).collect();
    let before_idx: HashMap<&str, usize> = before.iter().enumerate().map(|(k, e)| (e.key.as_str(), k)).collect();

    let common_before: Vec<&str> = before.iter().map(|e| e.key.as_str()).filter(|k| after_idx.contains_key(k)).collect();
    let after_rank: HashMap<&str, usize> = after
        .iter()
        .map(|e| e.key.as_str())
        .filter(|k| before_idx.contains_key(k))
        .enumerate()
        .map(|(r, k)| (k, r))
        .collect();
    let moved = moved(&common_before, &after_rank);

    let mut ops = Vec::new();
    for e in before {
        match after_idx.get(e.key.as_str()) {
            None => ops.push(EditOp {
                kind: EditKind::Delete,
                element_id: e.key.clone(),
                element_type: e.element_type.clone(),
                changed_attrs: Vec::new(),
            }),
            Some(&j) => {
                let mut groups = changed_groups(&e.map, &after[j].map);
                if moved.contains(&e.key) {
                    groups.insert("z_order");
                }
                if !groups.is_empty() {
                    let mut changed: Vec<&str> = groups.into_iter().collect();
                    changed.sort_by_key(|g| GROUP_ORDER.iter().position(|o| o == g));
                    ops.push(EditOp {
                        kind: EditKind::Modify,
                        element_id: e.key.clone(),
                        element_type: after[j].element_type.clone(),
                        changed_attrs: changed.into_iter().map(str::to_string).collect(),
                    });
                }
            }
        }
    }
    for e in after {
        if !before_idx.contains_key(e.key.as_str()) {
            ops.push(EditOp {
                kind: EditKind::Add,
                element_id: e.key.clone(),
                element_type: e.element_type.clone(),
                changed_attrs: Vec::new(),
            });
        }
    }
    ops.sort_by(|a, b| (a.kind, &a.element_id).cmp(&(b.kind, &b.element_id)));
    EditDistanceReport {
        distance: ops.len(),
        ops,
    }
}

pub fn edit_distance(before: &[u8], after: &[u8]) -> Result<EditDistanceReport, DiffError> {
    let a = keyed_elements(before).map_err(|source| DiffError {
        side: Side::Before,
        source,
    })?;
    let b = keyed_elements(after).map_err(|source| DiffError {
        side: Side::After,
        source,
    })?;
    Ok(diff_elements(&a, &b))
}

/// `distance: N` followed by one line per operation.
pub fn diff_report(report: &EditDistanceReport) -> String {
    let mut out = format!("distance: {}\n", report.distance);
    for op in &report.ops {
        let _ = match op.kind {
            EditKind::Modify => writeln!(out, "modify {} ({}): {}", op.element_id, op.element_type, op.changed_attrs.join(", ")),
            k => writeln!(out, "{} {} ({})", k.as_str(), op.element_id, op.element_type),
        };
    }
    out
}
