//! Append-only JSONL store of negative constraints, deduplicated by signature.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use fs4::fs_std::FileExt;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperienceEntry {
    pub error_signature: String,
    pub constraint_text: String,
    pub hit_count: u64,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
}

#[derive(Debug, thiserror::Error)]
#[error("experience ledger {path}: {source}")]
pub struct LedgerError {
    pub path: String,
    #[source]
    pub source: std::io::Error,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExperienceLedger {
    pub path: Option<PathBuf>,
    pub entries: Vec<ExperienceEntry>,
}

/// Parses ledger text, skipping (and logging) lines that are not entries.
pub fn parse_entries(text: &str, origin: &str) -> Vec<ExperienceEntry> {
    let mut out: Vec<ExperienceEntry> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<ExperienceEntry>(line) {
            Ok(e) if e.hit_count >= 1 => merge_into(&mut out, e),
            Ok(_) => log::warn!("{origin}:{}: entry with zero hit_count skipped", k + 1),
            Err(err) => log::warn!("{origin}:{}: corrupt ledger line skipped: {err}", k + 1),
        }
    }
    out
}

fn merge_into(entries: &mut Vec<ExperienceEntry>, e: ExperienceEntry) {
    match entries.iter_mut().find(|x| x.error_signature == e.error_signature) {
        Some(slot) => *slot = e,
        None => entries.push(e),
    }
}

fn lock_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".lock");
    PathBuf::from(p)
}

impl ExperienceLedger {
    pub fn in_memory() -> ExperienceLedger {
        ExperienceLedger::default()
    }

    /// Loads `path`; a missing file is an empty ledger.
    pub fn open(path: &Path) -> Result<ExperienceLedger, LedgerError> {
        let entries = match fs::read_to_string(path) {
            Ok(text) => parse_entries(&text, &path.display().to_string()),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(source) => {
                return Err(LedgerError {
                    path: path.display().to_string(),
                    source,
                })
            }
        };
        Ok(ExperienceLedger {
            path: Some(path.to_path_buf()),
            entries,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `entry`, or bumps the hit count of the entry sharing its signature.
    /// Returns true when a new entry was appended.
    pub fn record(&mut self, entry: ExperienceEntry) -> bool {
        match self.entries.iter_mut().find(|e| e.error_signature == entry.error_signature) {
            Some(e) => {
                e.hit_count += entry.hit_count.max(1);
                false
            }
            None => {
                self.entries.push(entry);
                true
            }
        }
    }

    pub fn constraints(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.constraint_text.as_str()).collect()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e).expect("entries serialize"));
            out.push('\n');
        }
        out
    }

    /// Writes under an advisory lock. Entries another writer saved since we
    /// loaded are kept; for shared signatures ours win.
    pub fn save(&mut self) -> Result<(), LedgerError> {
        let Some(path) = self.path.clone() else { return Ok(()) };
        let err = |source| LedgerError {
            path: path.display().to_string(),
            source,
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(err)?;
        }
        let lock = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(lock_path(&path))
            .map_err(err)?;
        lock.lock_exclusive().map_err(err)?;
        let result = (|| {
            let mut merged = match fs::read_to_string(&path) {
                Ok(text) => parse_entries(&text, &path.display().to_string()),
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
                Err(e) => return Err(e),
            };
            for e in &self.entries {
                merge_into(&mut merged, e.clone());
            }
            self.entries = merged;
            let tmp = path.with_extension("jsonl.tmp");
            let mut f = File::create(&tmp)?;
            f.write_all(self.to_jsonl().as_bytes())?;
            f.sync_all()?;
            fs::rename(&tmp, &path)
        })();
        let _ = FileExt::unlock(&lock);
        result.map_err(err)
    }
}
