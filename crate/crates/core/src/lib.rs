//! Figure blueprint toolchain: scene model and DSL, connector routing,
//! OpenXML presentation emission and parsing, SVG snapshots, deterministic
//! lints, archive edit distance, retrieval, icon post-processing and the
//! plan / assemble / refine generation loop.

pub mod assets;
pub mod diff;
pub mod geom;
pub mod kb;
pub mod lint;
pub mod pptx;
pub mod pipeline;
pub mod render;
pub mod router;
pub mod scene;
pub mod transport;

pub use diff::{diff_report, edit_distance, EditDistanceReport, EditKind, EditOp};
pub use geom::{Point, Rect};
pub use lint::{parse_issue_list, run_lints, Category, Issue, IssueList};
pub use router::{anchor_ports, route_all, route_elbow, RoutedPath, RouterConfig};
pub use scene::dsl::{parse_blueprint, serialize_blueprint, Blueprint, BlueprintError, BlueprintErrors};
pub use scene::{
    Align, ArrowHead, Asset, BlockStyle, Canvas, Color, Connector, ConnectorKind, ConnectorStyle, ContainerStyle,
    ElementId, Emu, Node, NodeKind, Port, Routing, Scene, SceneError, ShapeKind, TextSpec, Violation,
    ViolationCode,
};
pub use assets::RasterImage;
pub use kb::{KbRecord, KnowledgeBase};
pub use pipeline::{PipelineConfig, PipelineJob, PipelineReport, Services};
pub use pptx::{emit, emit_with, validate_archive, ArchiveReport, FigureArchive, ParsedArchive, PptxError};
pub use transport::{HttpTransport, OfflineTransport, Transport, TransportError};
