//! OpenXML presentation back end: one-slide archives written from a routed
//! scene, read back losslessly, and checked for structural soundness.
//!
//! Authored elements carry a small extension marker in their non-visual
//! properties; anything without it is foreign (added in slideware) and is
//! kept as an opaque record.

mod emit;
pub mod package;
pub(crate) mod parse;
mod validate;
pub mod xml;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::scene::{ElementId, Scene, Violation};

pub use parse::{c_nv_pr, marker, sp_tree_elements, SlideSource};

/// Extension URI and namespace of the authoring marker.
pub const MARKER_URI: &str = "{6C3F2A71-4E0B-4B5C-9D1A-2F8E0C5B7A10}";
pub const MARKER_NS: &str = "urn:figforge:scene";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FigureArchive {
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchiveReport {
    pub well_formed: bool,
    pub malformed_parts: Vec<String>,
    pub unresolved_rels: Vec<String>,
    pub missing_content_types: Vec<String>,
    pub dangling_connection_refs: Vec<String>,
}

impl Default for ArchiveReport {
    fn default() -> Self {
        ArchiveReport {
            well_formed: true,
            malformed_parts: Vec::new(),
            unresolved_rels: Vec::new(),
            missing_content_types: Vec::new(),
            dangling_connection_refs: Vec::new(),
        }
    }
}

impl ArchiveReport {
    pub fn is_valid(&self) -> bool {
        self.well_formed
            && self.malformed_parts.is_empty()
            && self.unresolved_rels.is_empty()
            && self.missing_content_types.is_empty()
            && self.dangling_connection_refs.is_empty()
    }
}

/// An element present in the slide that this crate did not write.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForeignElement {
    /// Position among the shape-tree children.
    pub ordinal: usize,
    pub element_type: String,
    pub shape_id: Option<u32>,
    pub name: Option<String>,
    /// Hash of the canonical attribute map.
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedArchive {
    pub scene: Scene,
    pub foreign: Vec<ForeignElement>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PptxError {
    #[error("not a zip archive: {0}")]
    NotZip(String),
    #[error("archive has no part '{0}'")]
    MissingPart(String),
    #[error("malformed XML in {part}: {message}")]
    Malformed { part: String, message: String },
    #[error("unexpected archive content: {0}")]
    Invalid(String),
    #[error("elbow connector '{0}' has not been routed")]
    UnroutedElbow(ElementId),
    #[error("icon asset '{id}' cannot be embedded: {reason}")]
    UnresolvedAsset { id: String, reason: String },
    #[error("scene does not validate: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidScene(Vec<Violation>),
    #[error("zip write failed: {0}")]
    Zip(String),
}

/// Supplies PNG bytes for scene assets.
pub trait AssetSource {
    fn load(&self, id: &str, path: &str) -> Result<Vec<u8>, String>;
}

/// Reads asset paths relative to a base directory.
#[derive(Debug, Clone)]
pub struct FsAssets {
    pub base: PathBuf,
}

impl FsAssets {
    pub fn new(base: impl Into<PathBuf>) -> FsAssets {
        FsAssets { base: base.into() }
    }
}

impl AssetSource for FsAssets {
    fn load(&self, _id: &str, path: &str) -> Result<Vec<u8>, String> {
        let p = self.base.join(path);
        std::fs::read(&p).map_err(|e| format!("{}: {e}", p.display()))
    }
}

/// Asset bytes keyed by asset id.
#[derive(Debug, Clone, Default)]
pub struct MemoryAssets(pub BTreeMap<String, Vec<u8>>);

impl AssetSource for MemoryAssets {
    fn load(&self, id: &str, _path: &str) -> Result<Vec<u8>, String> {
        self.0.get(id).cloned().ok_or_else(|| format!("no bytes for asset '{id}'"))
    }
}

/// Emits with asset paths resolved against the working directory.
pub fn emit(scene: &Scene) -> Result<FigureArchive, PptxError> {
    emit_with(scene, &FsAssets::new("."))
}

pub fn emit_with(scene: &Scene, assets: &dyn AssetSource) -> Result<FigureArchive, PptxError> {
    let violations = scene.validate();
    if !violations.is_empty() {
        return Err(PptxError::InvalidScene(violations));
    }
    emit::emit(scene, assets)
}

pub fn parse(bytes: &[u8]) -> Result<ParsedArchive, PptxError> {
    parse::parse(bytes)
}

pub fn validate_archive(bytes: &[u8]) -> ArchiveReport {
    validate::validate(bytes)
}
