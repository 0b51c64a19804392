//! Figure-text knowledge base: records, embedders and the two retrieval
//! indices (captions only, or descriptions falling back to captions).

mod embed;
mod index;

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use embed::{cosine, EmbedError, Embedder, HashEmbedder, HttpEmbedder, HttpEmbedderConfig};
pub use index::{build_index, query, select_index, select_index_with, IndexName, PersistError, VectorIndex, DEFAULT_SELECT_TOKENS};

pub const DEFAULT_K: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KbRecord {
    pub id: String,
    pub figure_ref: String,
    pub caption: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub venue: String,
}

#[derive(Debug, thiserror::Error)]
pub enum KbError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate record id '{id}'")]
    DuplicateId { line: usize, id: String },
    #[error("no records to index")]
    Empty,
    #[error("embedding record '{id}' failed: {source}")]
    Embed {
        id: String,
        #[source]
        source: EmbedError,
    },
    #[error("record '{id}' embedded to {got} dimensions, expected {expected}")]
    Dimension { id: String, expected: usize, got: usize },
}

/// Parses JSONL records; blank lines are ignored.
pub fn parse_records(text: &str) -> Result<Vec<KbRecord>, KbError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let rec: KbRecord = serde_json::from_str(raw).map_err(|e| KbError::Malformed {
            line,
            message: e.to_string(),
        })?;
        if rec.id.trim().is_empty() {
            return Err(KbError::Malformed {
                line,
                message: "empty id".into(),
            });
        }
        if rec.caption.trim().is_empty() {
            return Err(KbError::Malformed {
                line,
                message: format!("record '{}' has an empty caption", rec.id),
            });
        }
        if !seen.insert(rec.id.clone()) {
            return Err(KbError::DuplicateId { line, id: rec.id });
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn ingest(path: &Path) -> Result<Vec<KbRecord>, KbError> {
    let text = std::fs::read_to_string(path).map_err(|e| KbError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_records(&text)
}

/// Records plus both indices, stored together in one directory.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBase {
    pub records: Vec<KbRecord>,
    pub caption: VectorIndex,
    pub hybrid: VectorIndex,
}

pub const RECORDS_FILE: &str = "records.jsonl";
pub const CAPTION_FILE: &str = "caption.ffix";
pub const HYBRID_FILE: &str = "hybrid.ffix";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error("{path}: {source}")]
    Index {
        path: String,
        #[source]
        source: PersistError,
    },
    #[error("{0}")]
    Mismatch(String),
}

impl KnowledgeBase {
    pub fn build(records: Vec<KbRecord>, embedder: &dyn Embedder) -> Result<KnowledgeBase, KbError> {
        let caption = build_index(&records, embedder, IndexName::Caption)?;
        let hybrid = build_index(&records, embedder, IndexName::Hybrid)?;
        Ok(KnowledgeBase { records, caption, hybrid })
    }

    pub fn by_name(&self, name: IndexName) -> &VectorIndex {
        match name {
            IndexName::Caption => &self.caption,
            IndexName::Hybrid => &self.hybrid,
        }
    }

    /// Top-`k` records from the index the selector picks for `text`.
    pub fn retrieve(&self, text: &str, k: usize, embedder: &dyn Embedder) -> Result<(IndexName, Vec<(KbRecord, f64)>), KbError> {
        let name = select_index(text);
        let hits = query(self.by_name(name), text, k, embedder)?;
        let out = hits
            .into_iter()
            .filter_map(|(id, score)| self.records.iter().find(|r| r.id == id).map(|r| (r.clone(), score)))
            .collect();
        Ok((name, out))
    }

    pub fn save(&self, dir: &Path) -> Result<(), StoreError> {
        let io = |path: &Path, e: std::io::Error| KbError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let mut jsonl = String::new();
        for r in &self.records {
            jsonl.push_str(&serde_json::to_string(r).expect("records serialize"));
            jsonl.push('\n');
        }
        let rp = dir.join(RECORDS_FILE);
        std::fs::write(&rp, jsonl).map_err(|e| io(&rp, e))?;
        for (file, idx) in [(CAPTION_FILE, &self.caption), (HYBRID_FILE, &self.hybrid)] {
            let p = dir.join(file);
            std::fs::write(&p, idx.to_bytes()).map_err(|e| io(&p, e))?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<KnowledgeBase, StoreError> {
        let records = ingest(&dir.join(RECORDS_FILE))?;
        let read = |file: &str| -> Result<VectorIndex, StoreError> {
            let p = dir.join(file);
            let err = |source| StoreError::Index {
                path: p.display().to_string(),
                source,
            };
            let bytes = std::fs::read(&p).map_err(|e| err(PersistError::Io(e)))?;
            VectorIndex::read_from(&mut bytes.as_slice()).map_err(err)
        };
        let caption = read(CAPTION_FILE)?;
        let hybrid = read(HYBRID_FILE)?;
        for idx in [&caption, &hybrid] {
            let ids: Vec<&str> = idx.entries.iter().map(|(id, _)| id.as_str()).collect();
            let want: Vec<&str> = records.iter().map(|r| r.id.as_str()).collect();
            if ids != want {
                return Err(StoreError::Mismatch(format!("{} index does not match {RECORDS_FILE}", idx.name.as_str())));
            }
        }
        Ok(KnowledgeBase { records, caption, hybrid })
    }
}
