//! Order-insensitive, whitespace-insensitive view of one slide element.
//!
//! Every attribute and text node becomes a `path -> value` entry. Paths use
//! local names; repeated siblings get an index. Numeric shape ids are
//! dropped (they renumber on any insertion), connection references resolve
//! to the target's name and image references resolve to a content hash.

use std::collections::{BTreeMap, HashMap};

use roxmltree::Node;
use sha2::{Digest, Sha256};

pub type CanonicalMap = BTreeMap<String, String>;

/// Resolution tables for references that leave the element.
#[derive(Debug, Clone, Default)]
pub struct CanonCtx {
    /// numeric shape id -> shape name
    pub names: HashMap<String, String>,
    /// relationship id -> hash of the target part bytes
    pub media: HashMap<String, String>,
}

/// Wrappers with no meaning of their own when empty.
const EMPTY_CONTAINERS: &[&str] = &[
    "avLst", "gdLst", "ahLst", "cxnLst", "lstStyle", "nvPr", "cNvSpPr", "cNvPicPr", "cNvCxnSpPr",
    "cNvGrpSpPr", "extLst", "effectLst", "picLocks",
];

const VOLATILE_ATTRS: &[&str] = &["dirty", "lang", "err", "smtClean", "noProof"];

fn normalize(value: &str) -> String {
    let t = value.trim();
    if let Ok(n) = t.parse::<i64>() {
        return n.to_string();
    }
    t.to_string()
}

pub fn hash_bytes(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn walk(node: Node, path: &str, ctx: &CanonCtx, out: &mut CanonicalMap) {
    let name = node.tag_name().name();
    let mut recorded = false;
    for attr in node.attributes() {
        let an = attr.name();
        if VOLATILE_ATTRS.contains(&an) {
            continue;
        }
        let value = match (name, an) {
            ("cNvPr", "id") => continue,
            ("stCxn" | "endCxn", "id") => {
                let v = normalize(attr.value());
                ctx.names.get(&v).cloned().unwrap_or(format!("#{v}"))
            }
            (_, "embed" | "link") if attr.namespace().is_some() => {
                let v = attr.value().trim();
                ctx.media.get(v).cloned().unwrap_or_else(|| format!("rel:{v}"))
            }
            _ => normalize(attr.value()),
        };
        out.insert(format!("{path}@{an}"), value);
        recorded = true;
    }

    let elements: Vec<Node> = node.children().filter(|c| c.is_element()).collect();
    let text: String = node.children().filter(|c| c.is_text()).filter_map(|c| c.text()).collect();
    if name == "t" {
        // run text is significant verbatim
        out.insert(format!("{path}#text"), text);
        return;
    }
    if !text.trim().is_empty() {
        out.insert(format!("{path}#text"), text.trim().to_string());
        recorded = true;
    }

    let mut counts: HashMap<&str, usize> = HashMap::new();
    for c in &elements {
        *counts.entry(c.tag_name().name()).or_insert(0) += 1;
    }
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for c in &elements {
        let cn = c.tag_name().name();
        let child_path = if counts[cn] > 1 {
            let k = seen.entry(cn).or_insert(0);
            let p = format!("{path}/{cn}[{k}]");
            *k += 1;
            p
        } else {
            format!("{path}/{cn}")
        };
        let before = out.len();
        walk(*c, &child_path, ctx, out);
        if out.len() > before {
            recorded = true;
        }
    }

    if !recorded && !EMPTY_CONTAINERS.contains(&name) {
        out.insert(path.to_string(), String::new());
    }
}

/// Canonical map of a slide element; paths are rooted at the element's local name.
pub fn canonical_map(node: Node, ctx: &CanonCtx) -> CanonicalMap {
    let mut out = CanonicalMap::new();
    walk(node, node.tag_name().name(), ctx, &mut out);
    out
}

/// Canonical map of a standalone, well-formed XML fragment.
pub fn canonicalize_element(xml: &str) -> Result<CanonicalMap, roxmltree::Error> {
    let doc = roxmltree::Document::parse_with_options(
        xml,
        roxmltree::ParsingOptions {
            allow_dtd: false,
            ..Default::default()
        },
    )?;
    Ok(canonical_map(doc.root_element(), &CanonCtx::default()))
}

pub fn map_hash(map: &CanonicalMap) -> String {
    let mut h = Sha256::new();
    for (k, v) in map {
        h.update(k.as_bytes());
        h.update([0]);
        h.update(v.as_bytes());
        h.update([0]);
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Attribute group a canonical path belongs to.
pub fn group_of(path: &str) -> &'static str {
    if path.contains("/stCxn") || path.contains("/endCxn") {
        "connection"
    } else if path.contains("/xfrm/off") {
        "position"
    } else if path.contains("/xfrm/ext") {
        "size"
    } else if path.contains("Geom") || path.contains("/xfrm@") {
        "geometry"
    } else if path.contains("/ln/") || path.contains("/ln@") {
        "line"
    } else if path.ends_with("#text") && path.contains("txBody") {
        "text"
    } else if path.contains("txBody") {
        "font"
    } else if path.contains("/spPr/solidFill") || path.contains("/spPr/noFill") || path.contains("blipFill") {
        "fill"
    } else if path.contains("/cNvPr") {
        "name"
    } else {
        "other"
    }
}
