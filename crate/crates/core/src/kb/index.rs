use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::embed::{cosine, Embedder};
use super::{KbError, KbRecord};

pub const DEFAULT_SELECT_TOKENS: usize = 12;

const MAGIC: &[u8; 4] = b"FFIX";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexName {
    Caption,
    Hybrid,
}

impl IndexName {
    pub fn as_str(self) -> &'static str {
        match self {
            IndexName::Caption => "caption",
            IndexName::Hybrid => "hybrid",
        }
    }

    fn code(self) -> u8 {
        match self {
            IndexName::Caption => 0,
            IndexName::Hybrid => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorIndex {
    pub name: IndexName,
    pub dim: usize,
    pub entries: Vec<(String, Vec<f64>)>,
}

/// Text a record contributes to an index.
pub fn indexed_text(record: &KbRecord, name: IndexName) -> &str {
    match name {
        IndexName::Hybrid if !record.description.trim().is_empty() => &record.description,
        _ => &record.caption,
    }
}

pub fn build_index(records: &[KbRecord], embedder: &dyn Embedder, name: IndexName) -> Result<VectorIndex, KbError> {
    if records.is_empty() {
        return Err(KbError::Empty);
    }
    let dim = embedder.dim();
    let mut entries = Vec::with_capacity(records.len());
    for r in records {
        let v = embedder.embed(indexed_text(r, name)).map_err(|source| KbError::Embed {
            id: r.id.clone(),
            source,
        })?;
        if v.len() != dim {
            return Err(KbError::Dimension {
                id: r.id.clone(),
                expected: dim,
                got: v.len(),
            });
        }
        entries.push((r.id.clone(), v));
    }
    Ok(VectorIndex { name, dim, entries })
}

struct Ranked<'a> {
    score: f64,
    id: &'a str,
}

impl Ranked<'_> {
    /// Less = better: higher score first, then ascending id.
    fn rank_cmp(&self, other: &Self) -> Ordering {
        other.score.total_cmp(&self.score).then_with(|| self.id.cmp(other.id))
    }
}

impl PartialEq for Ranked<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.rank_cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked<'_> {}
impl PartialOrd for Ranked<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank_cmp(other)
    }
}

/// Top-`k` records by cosine similarity, ties by ascending id.
pub fn query(index: &VectorIndex, text: &str, k: usize, embedder: &dyn Embedder) -> Result<Vec<(String, f64)>, KbError> {
    let q = embedder.embed(text).map_err(|source| KbError::Embed {
        id: "<query>".into(),
        source,
    })?;
    if q.len() != index.dim {
        return Err(KbError::Dimension {
            id: "<query>".into(),
            expected: index.dim,
            got: q.len(),
        });
    }
    Ok(query_vector(index, &q, k))
}

pub fn query_vector(index: &VectorIndex, q: &[f64], k: usize) -> Vec<(String, f64)> {
    // max-heap on rank: the top is the worst of the current best k
    let mut heap: BinaryHeap<Ranked> = BinaryHeap::with_capacity(k + 1);
    for (id, v) in &index.entries {
        heap.push(Ranked {
            score: cosine(q, v),
            id,
        });
        if heap.len() > k {
            heap.pop();
        }
    }
    heap.into_sorted_vec().into_iter().map(|r| (r.id.to_string(), r.score)).collect()
}

/// Short keyword queries use the caption index; longer prose the hybrid one.
pub fn select_index(query_text: &str) -> IndexName {
    select_index_with(query_text, DEFAULT_SELECT_TOKENS)
}

pub fn select_index_with(query_text: &str, max_caption_tokens: usize) -> IndexName {
    if query_text.split_whitespace().count() <= max_caption_tokens {
        IndexName::Caption
    } else {
        IndexName::Hybrid
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PersistError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("not an index file")]
    BadMagic,
    #[error("unsupported index version {0}")]
    Version(u32),
    #[error("corrupt index: {0}")]
    Corrupt(String),
}

impl VectorIndex {
    /// `FFIX`, version, name, dim, count, then per entry: id length, id
    /// bytes, dim little-endian f64 values.
    pub fn write_to(&self, w: &mut impl Write) -> Result<(), PersistError> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&[self.name.code()])?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(&(self.entries.len() as u64).to_le_bytes())?;
        for (id, v) in &self.entries {
            w.write_all(&(id.len() as u32).to_le_bytes())?;
            w.write_all(id.as_bytes())?;
            for x in v {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to memory");
        out
    }

    pub fn read_from(r: &mut impl Read) -> Result<VectorIndex, PersistError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(PersistError::BadMagic);
        }
        let version = read_u32(r)?;
        if version != VERSION {
            return Err(PersistError::Version(version));
        }
        let mut code = [0u8; 1];
        r.read_exact(&mut code)?;
        let name = match code[0] {
            0 => IndexName::Caption,
            1 => IndexName::Hybrid,
            c => return Err(PersistError::Corrupt(format!("index name code {c}"))),
        };
        let dim = read_u32(r)? as usize;
        let mut count = [0u8; 8];
        r.read_exact(&mut count)?;
        let count = u64::from_le_bytes(count);
        let mut entries = Vec::new();
        for _ in 0..count {
            let len = read_u32(r)? as usize;
            if len > 1 << 20 {
                return Err(PersistError::Corrupt("record id too long".into()));
            }
            let mut id = vec![0u8; len];
            r.read_exact(&mut id)?;
            let id = String::from_utf8(id).map_err(|_| PersistError::Corrupt("record id is not UTF-8".into()))?;
            let mut v = Vec::with_capacity(dim);
            let mut buf = [0u8; 8];
            for _ in 0..dim {
                r.read_exact(&mut buf)?;
                v.push(f64::from_le_bytes(buf));
            }
            entries.push((id, v));
        }
        Ok(VectorIndex { name, dim, entries })
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32, PersistError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::HashEmbedder;

    fn rec(id: &str, caption: &str, description: &str) -> KbRecord {
        KbRecord {
            id: id.into(),
            figure_ref: format!("figs/{id}.png"),
            caption: caption.into(),
            description: description.into(),
            venue: String::new(),
        }
    }

    fn records() -> Vec<KbRecord> {
        vec![
            rec("r1", "Encoder decoder overview", "Two stacks of attention layers"),
            rec("r2", "Graph attention for EEG", ""),
            rec("r3", "Diffusion sampling loop", "Noise is removed step by step"),
            rec("r4", "Retrieval augmented pipeline", "Documents feed a generator"),
            rec("r5", "Contrastive pretraining", "Image and text towers"),
        ]
    }

    #[test]
    fn hybrid_falls_back_to_captions() {
        let e = HashEmbedder::default();
        let recs = &records()[..3];
        let hybrid = build_index(recs, &e, IndexName::Hybrid).unwrap();
        assert_eq!(hybrid.entries.len(), 3);
        assert_eq!(hybrid.entries[1].1, e.embed("Graph attention for EEG").unwrap());
        assert_eq!(hybrid.entries[0].1, e.embed("Two stacks of attention layers").unwrap());
        assert_eq!(build_index(recs, &e, IndexName::Hybrid).unwrap(), hybrid);
        assert!(matches!(build_index(&[], &e, IndexName::Caption), Err(KbError::Empty)));
    }

    #[test]
    fn exact_caption_ranks_first_with_unit_score() {
        let e = HashEmbedder::default();
        let idx = build_index(&records(), &e, IndexName::Caption).unwrap();
        let hits = query(&idx, "Diffusion sampling loop", 2, &e).unwrap();
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[0].0, "r3");
        assert!((hits[0].1 - 1.0).abs() < 1e-12);
        assert_eq!(query(&idx, "x", 50, &e).unwrap().len(), 5);
    }

    #[test]
    fn zero_query_scores_zero_in_id_order() {
        let e = HashEmbedder::default();
        let idx = build_index(&records(), &e, IndexName::Caption).unwrap();
        let hits = query(&idx, "", 3, &e).unwrap();
        assert_eq!(hits.iter().map(|h| h.0.as_str()).collect::<Vec<_>>(), vec!["r1", "r2", "r3"]);
        assert!(hits.iter().all(|h| h.1 == 0.0));
    }

    #[test]
    fn selector_boundary_is_inclusive() {
        assert_eq!(select_index("graph attention EEG"), IndexName::Caption);
        assert_eq!(select_index(&"w ".repeat(12)), IndexName::Caption);
        assert_eq!(select_index(&"w ".repeat(13)), IndexName::Hybrid);
        assert_eq!(select_index_with("a b c", 2), IndexName::Hybrid);
    }

    #[test]
    fn persistence_round_trips() {
        let e = HashEmbedder::default();
        let idx = build_index(&records(), &e, IndexName::Hybrid).unwrap();
        let bytes = idx.to_bytes();
        assert_eq!(&bytes[..4], b"FFIX");
        let back = VectorIndex::read_from(&mut bytes.as_slice()).unwrap();
        assert_eq!(back, idx);
        assert!(matches!(VectorIndex::read_from(&mut &b"NOPE...."[..]), Err(PersistError::BadMagic)));
        assert!(VectorIndex::read_from(&mut &bytes[..bytes.len() - 3]).is_err());
    }
}
