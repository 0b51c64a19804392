//! The generation loop: plan from the method text and retrieved references,
//! assemble a blueprint with a bounded self-repair loop, then refine the
//! rendered figure against lint and critic issues.

pub mod client;
pub mod distill;
pub mod ledger;
pub mod prompts;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use client::{
    EndpointConfig, FixedImage, HttpImageClient, HttpModelClient, ImageClient, ModelClient, ModelError, ModelRequest,
    Part, ScriptEntry, ScriptedMock,
};
pub use distill::{constraint_for, distill_experience};
pub use ledger::{ExperienceEntry, ExperienceLedger, LedgerError};

use crate::assets::{placeholder_composite, remove_background, slice_grid, trim_transparent, RasterImage};
use crate::kb::{Embedder, KnowledgeBase, DEFAULT_K, DEFAULT_SELECT_TOKENS};
use crate::lint::{parse_issue_list_lenient, run_lints, Category, IssueList};
use crate::pptx::{emit_with, AssetSource, FigureArchive, FsAssets, PptxError};
use crate::render::{rasterize, render_svg};
use crate::router::{route_all, RouterConfig};
use crate::scene::dsl::{parse_blueprint, BlueprintErrors};
use crate::scene::{Canvas, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Stage {
    Plan,
    Assets,
    Assemble,
    Refine,
    Emit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub k: usize,
    pub t_max: usize,
    pub refine_max: usize,
    pub canvas: Canvas,
    pub offline: bool,
    /// Queries with at most this many words use the caption index.
    pub select_tokens: usize,
    /// Stamp for new ledger entries, seconds since the epoch.
    pub timestamp: u64,
    /// Pixel size of one placeholder icon tile.
    pub icon_tile: u32,
    /// Directory for asset paths the pipeline did not generate.
    pub asset_dir: Option<PathBuf>,
    /// Shell command turning the SVG snapshot into PNG for the critic.
    pub rasterize_command: Option<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            k: DEFAULT_K,
            t_max: 3,
            refine_max: 3,
            canvas: Canvas::default(),
            offline: false,
            select_tokens: DEFAULT_SELECT_TOKENS,
            timestamp: 0,
            icon_tile: 64,
            asset_dir: None,
            rasterize_command: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Retrieved {
    pub id: String,
    pub caption: String,
    pub description: String,
    pub score: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    pub retrieved: Vec<Retrieved>,
    pub plan_text: Option<String>,
    pub blueprint_image: Option<Vec<u8>>,
    /// asset id -> PNG bytes
    pub asset_lib: BTreeMap<String, Vec<u8>>,
    pub dsl_history: Vec<String>,
    pub scene: Option<Scene>,
    pub snapshot: Option<String>,
    pub archive: Option<FigureArchive>,
    pub issue_history: Vec<IssueList>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub turn: usize,
    pub stage: Stage,
    pub request_hash: String,
    pub response: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PipelineJob {
    pub input_text: String,
    pub config: PipelineConfig,
    pub artifacts: Artifacts,
    pub transcript: Vec<TranscriptEntry>,
    pub notices: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub debug_turns: usize,
    pub refine_rounds: usize,
    pub final_issue_count: usize,
    pub lint_stats: BTreeMap<Category, usize>,
    pub executable: bool,
    /// The refine loop used every round and issues remain.
    pub refine_halted: bool,
    pub ledger_added: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{stage:?}: {source}")]
    Model {
        stage: Stage,
        #[source]
        source: ModelError,
    },
    #[error("ASSETS: {0}")]
    Assets(String),
    #[error("EMIT: {0}")]
    Emit(#[from] PptxError),
    #[error("PLAN: retrieval failed: {0}")]
    Retrieval(String),
}

impl PipelineError {
    pub fn stage(&self) -> Stage {
        match self {
            PipelineError::Model { stage, .. } => *stage,
            PipelineError::Assets(_) => Stage::Assets,
            PipelineError::Emit(_) => Stage::Emit,
            PipelineError::Retrieval(_) => Stage::Plan,
        }
    }
}

/// Everything a job talks to.
pub struct Services<'a> {
    pub model: &'a dyn ModelClient,
    pub critic: Option<&'a dyn ModelClient>,
    pub image: Option<&'a dyn ImageClient>,
    pub kb: Option<(&'a KnowledgeBase, &'a dyn Embedder)>,
    pub ledger: &'a mut ExperienceLedger,
}

impl PipelineJob {
    pub fn new(input_text: impl Into<String>, config: PipelineConfig) -> PipelineJob {
        PipelineJob {
            input_text: input_text.into(),
            config,
            ..Default::default()
        }
    }

    fn call(&mut self, stage: Stage, client: &dyn ModelClient, request: ModelRequest) -> Result<String, PipelineError> {
        let response = client
            .generate(&request)
            .map_err(|source| PipelineError::Model { stage, source })?;
        self.transcript.push(TranscriptEntry {
            turn: self.transcript.len(),
            stage,
            request_hash: request.hash(),
            response: response.clone(),
        });
        Ok(response)
    }

    fn call_image(&mut self, stage: Stage, client: &dyn ImageClient, prompt: &str) -> Result<Vec<u8>, PipelineError> {
        let bytes = client
            .generate_image(prompt)
            .map_err(|source| PipelineError::Model { stage, source })?;
        let request = ModelRequest {
            system_text: String::new(),
            user_parts: vec![Part::text(prompt)],
            max_turn_tag: format!("{stage:?}-image").to_lowercase(),
        };
        self.transcript.push(TranscriptEntry {
            turn: self.transcript.len(),
            stage,
            request_hash: request.hash(),
            response: format!("<image {} bytes {}>", bytes.len(), crate::diff::canonical::hash_bytes(&bytes)),
        });
        Ok(bytes)
    }

    /// One JSON object per line.
    pub fn transcript_jsonl(&self) -> String {
        let mut out = String::new();
        for t in &self.transcript {
            out.push_str(&serde_json::to_string(t).expect("transcript serializes"));
            out.push('\n');
        }
        out
    }

    fn canvas_text(&self) -> String {
        format!(
            "{} x {} in",
            crate::render::num(self.config.canvas.width.to_inches()),
            crate::render::num(self.config.canvas.height.to_inches())
        )
    }
}

/// Model replies often wrap the document in a fenced block; take its body.
pub fn extract_document(response: &str) -> String {
    if let Some(start) = response.find("```") {
        let after = &response[start + 3..];
        let body_start = after.find('\n').map_or(after.len(), |i| i + 1);
        let body = &after[body_start..];
        if let Some(end) = body.find("```") {
            return body[..end].trim().to_string();
        }
    }
    response.trim().to_string()
}

/// Names listed on an `entities:` line of the plan, in order, deduplicated.
pub fn plan_entities(plan: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for line in plan.lines() {
        let t = line.trim().trim_start_matches(['-', '*', ' ']);
        let Some(rest) = t.get(..9).filter(|h| h.eq_ignore_ascii_case("entities:")).map(|_| &t[9..]) else {
            continue;
        };
        for name in rest.split(',') {
            let name = name.trim().trim_end_matches('.').trim();
            if !name.is_empty() && !out.iter().any(|n| n.eq_ignore_ascii_case(name)) {
                out.push(name.to_string());
            }
        }
    }
    out
}

pub fn asset_slug(name: &str) -> String {
    let mut s = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            s.push(c.to_ascii_lowercase());
        } else if !s.ends_with('_') && !s.is_empty() {
            s.push('_');
        }
    }
    let s = s.trim_end_matches('_').to_string();
    if s.is_empty() {
        "icon".into()
    } else {
        s
    }
}

pub fn plan(job: &mut PipelineJob, services: &mut Services<'_>) -> Result<(), PipelineError> {
    job.artifacts.retrieved.clear();
    match services.kb {
        Some((kb, embedder)) => {
            let name = crate::kb::select_index_with(&job.input_text, job.config.select_tokens);
            let hits = crate::kb::query(kb.by_name(name), &job.input_text, job.config.k, embedder)
                .map_err(|e| PipelineError::Retrieval(e.to_string()))?;
            for (id, score) in hits {
                if let Some(r) = kb.records.iter().find(|r| r.id == id) {
                    job.artifacts.retrieved.push(Retrieved {
                        id,
                        caption: r.caption.clone(),
                        description: r.description.clone(),
                        score,
                    });
                }
            }
        }
        None => job.notices.push("no knowledge base loaded; planning without references".into()),
    }
    let references = if job.artifacts.retrieved.is_empty() {
        "(none)".to_string()
    } else {
        job.artifacts
            .retrieved
            .iter()
            .enumerate()
            .map(|(k, r)| {
                if r.description.trim().is_empty() {
                    format!("[{}] {}", k + 1, r.caption)
                } else {
                    format!("[{}] {}\n    {}", k + 1, r.caption, r.description)
                }
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    let canvas = job.canvas_text();
    let request = ModelRequest {
        system_text: String::new(),
        user_parts: vec![Part::text(prompts::fill(
            prompts::PLAN,
            &[("input", &job.input_text), ("references", &references), ("canvas", &canvas)],
        ))],
        max_turn_tag: "plan".into(),
    };
    let plan_text = job.call(Stage::Plan, services.model, request)?;
    job.artifacts.plan_text = Some(plan_text.clone());

    match (services.image, job.config.offline) {
        (Some(image), false) => {
            let prompt = prompts::fill(prompts::BLUEPRINT, &[("plan", &plan_text)]);
            job.artifacts.blueprint_image = Some(job.call_image(Stage::Plan, image, &prompt)?);
        }
        _ => job
            .notices
            .push("no image endpoint configured; blueprint image skipped".into()),
    }
    Ok(())
}

/// Generates icons for the plan's entities and post-processes them into
/// `asset_lib`. Offline, a synthesized composite stands in for the model.
pub fn build_assets(job: &mut PipelineJob, services: &mut Services<'_>) -> Result<(), PipelineError> {
    let entities = plan_entities(job.artifacts.plan_text.as_deref().unwrap_or(""));
    if entities.is_empty() {
        return Ok(());
    }
    let count = entities.len() as u32;
    let n = (count as f64).sqrt().ceil() as u32;
    let m = count.div_ceil(n);
    let composite = match (services.image, job.config.offline) {
        (Some(image), false) => {
            let prompt = prompts::fill(
                prompts::ICONS,
                &[("m", &m.to_string()), ("n", &n.to_string()), ("entities", &entities.join(", "))],
            );
            let bytes = job.call_image(Stage::Assets, image, &prompt)?;
            RasterImage::decode_png(&bytes).map_err(|e| PipelineError::Assets(e.to_string()))?
        }
        _ => {
            job.notices
                .push(format!("icon grid {m}x{n} synthesized locally for: {}", entities.join(", ")));
            placeholder_composite(m, n, job.config.icon_tile.max(4))
        }
    };
    let tiles = slice_grid(&composite, m, n).map_err(|e| PipelineError::Assets(e.to_string()))?;
    for (name, tile) in entities.iter().zip(tiles) {
        let icon = trim_transparent(&remove_background(&tile));
        let png = icon.encode_png().map_err(|e| PipelineError::Assets(e.to_string()))?;
        let mut slug = asset_slug(name);
        let mut k = 2;
        while job.artifacts.asset_lib.contains_key(&slug) {
            slug = format!("{}_{k}", asset_slug(name));
            k += 1;
        }
        job.artifacts.asset_lib.insert(slug, png);
    }
    Ok(())
}

fn asset_listing(job: &PipelineJob) -> String {
    if job.artifacts.asset_lib.is_empty() {
        return "(none)".into();
    }
    job.artifacts
        .asset_lib
        .keys()
        .map(|id| format!("- {id}: path \"assets/{id}.png\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn error_log(errors: &BlueprintErrors) -> String {
    errors.0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n")
}

fn record_errors(job: &PipelineJob, ledger: &mut ExperienceLedger, errors: &BlueprintErrors) -> usize {
    errors
        .0
        .iter()
        .filter(|e| ledger.record(distill_experience(e, job.config.timestamp)))
        .count()
}

/// Blueprint generation with up to `t_max` repair turns. Returns
/// (debug turns used, new ledger entries).
pub fn assemble(job: &mut PipelineJob, services: &mut Services<'_>) -> Result<(usize, usize), PipelineError> {
    let plan_text = job.artifacts.plan_text.clone().unwrap_or_default();
    let skills = prompts::skills_doc();
    let canvas = job.canvas_text();
    let assets = asset_listing(job);
    let constraints = prompts::constraint_block(&services.ledger.constraints());
    let mut parts = vec![Part::text(prompts::fill(
        prompts::GENERATE,
        &[
            ("skills", &skills),
            ("canvas", &canvas),
            ("assets", &assets),
            ("constraints", &constraints),
            ("plan", &plan_text),
        ],
    ))];
    if let Some(img) = &job.artifacts.blueprint_image {
        parts.push(Part::Image {
            media_type: "image/png".into(),
            data: img.clone(),
        });
    }
    let request = ModelRequest {
        system_text: prompts::GENERATE_SYSTEM.to_string(),
        user_parts: parts,
        max_turn_tag: "assemble-0".into(),
    };
    let mut dsl = extract_document(&job.call(Stage::Assemble, services.model, request)?);
    job.artifacts.dsl_history.push(dsl.clone());
    let mut turns = 0;
    let mut added = 0;
    loop {
        match parse_blueprint(&dsl) {
            Ok(bp) => {
                job.notices.extend(bp.warnings);
                job.artifacts.scene = Some(route_all(&bp.scene, &RouterConfig::default()));
                return Ok((turns, added));
            }
            Err(errors) => {
                added += record_errors(job, services.ledger, &errors);
                if turns == job.config.t_max {
                    job.artifacts.scene = None;
                    job.notices
                        .push(format!("blueprint still invalid after {turns} repair turns"));
                    return Ok((turns, added));
                }
                turns += 1;
                let constraints = prompts::constraint_block(&services.ledger.constraints());
                let request = ModelRequest {
                    system_text: prompts::GENERATE_SYSTEM.to_string(),
                    user_parts: vec![Part::text(prompts::fill(
                        prompts::DEBUG,
                        &[("constraints", &constraints), ("errors", &error_log(&errors)), ("dsl", &dsl)],
                    ))],
                    max_turn_tag: format!("debug-{turns}"),
                };
                dsl = extract_document(&job.call(Stage::Assemble, services.model, request)?);
                job.artifacts.dsl_history.push(dsl.clone());
            }
        }
    }
}

fn snapshot_part(job: &mut PipelineJob, svg: &str) -> Part {
    if let Some(cmd) = job.config.rasterize_command.clone() {
        let dir = std::env::temp_dir().join(format!("figforge-snap-{}", std::process::id()));
        let out = dir.join("snapshot.png");
        let result = std::fs::create_dir_all(&dir)
            .map_err(|e| e.to_string())
            .and_then(|_| rasterize(svg, &cmd, &out).map_err(|e| e.to_string()))
            .and_then(|_| std::fs::read(&out).map_err(|e| e.to_string()));
        let _ = std::fs::remove_dir_all(&dir);
        match result {
            Ok(png) => {
                return Part::Image {
                    media_type: "image/png".into(),
                    data: png,
                }
            }
            Err(e) => job.notices.push(format!("rasterizer failed, sending SVG: {e}")),
        }
    }
    Part::Image {
        media_type: "image/svg+xml".into(),
        data: svg.as_bytes().to_vec(),
    }
}

/// Issues for the current scene: deterministic lints, then critic findings.
fn collect_issues(job: &mut PipelineJob, services: &mut Services<'_>, scene: &Scene) -> Result<IssueList, PipelineError> {
    let svg = render_svg(scene).map(|a| a.svg).unwrap_or_default();
    job.artifacts.snapshot = Some(svg.clone());
    let mut issues = run_lints(scene);
    if let Some(critic) = services.critic {
        let known = if issues.is_empty() { "(none)".to_string() } else { issues.serialize() };
        let request = ModelRequest {
            system_text: prompts::CRITIQUE_SYSTEM.to_string(),
            user_parts: vec![
                Part::text(prompts::fill(prompts::CRITIQUE, &[("issues", known.trim_end())])),
                snapshot_part(job, &svg),
            ],
            max_turn_tag: format!("critique-{}", job.artifacts.issue_history.len()),
        };
        let response = job.call(Stage::Refine, critic, request)?;
        let (extra, rejected) = parse_issue_list_lenient(&response);
        for r in rejected {
            job.notices.push(format!("critic line skipped: {r}"));
        }
        issues.0.extend(extra.0);
    }
    Ok(issues)
}

/// Critique-and-patch rounds. Returns (rounds used, halted with issues left,
/// final issues, new ledger entries).
pub fn refine(job: &mut PipelineJob, services: &mut Services<'_>) -> Result<(usize, bool, IssueList, usize), PipelineError> {
    let Some(mut scene) = job.artifacts.scene.clone() else {
        return Ok((0, false, IssueList::default(), 0));
    };
    let mut dsl = job.artifacts.dsl_history.last().cloned().unwrap_or_default();
    let mut rounds = 0;
    let mut added = 0;
    let mut pending_errors: Option<String> = None;
    let mut converged = false;
    while rounds < job.config.refine_max {
        let issues = collect_issues(job, services, &scene)?;
        job.artifacts.issue_history.push(issues.clone());
        if issues.is_empty() && pending_errors.is_none() {
            converged = true;
            break;
        }
        let constraints = prompts::constraint_block(&services.ledger.constraints());
        let errors = pending_errors
            .take()
            .map(|e| format!("\nThe previous update was rejected by the validator:\n{e}\n"))
            .unwrap_or_default();
        let listed = if issues.is_empty() { "(none)".to_string() } else { issues.serialize() };
        let request = ModelRequest {
            system_text: prompts::GENERATE_SYSTEM.to_string(),
            user_parts: vec![Part::text(prompts::fill(
                prompts::REFINE,
                &[("issues", listed.trim_end()), ("errors", &errors), ("constraints", &constraints), ("dsl", &dsl)],
            ))],
            max_turn_tag: format!("refine-{rounds}"),
        };
        let patch = extract_document(&job.call(Stage::Refine, services.model, request)?);
        rounds += 1;
        match parse_blueprint(&patch) {
            Ok(bp) => {
                let next = route_all(&bp.scene, &RouterConfig::default());
                job.artifacts.dsl_history.push(patch.clone());
                if next == scene {
                    job.notices.push("refine patch left the figure unchanged; stopping".into());
                    converged = true;
                    break;
                }
                scene = next;
                dsl = patch;
            }
            Err(errs) => {
                added += record_errors(job, services.ledger, &errs);
                pending_errors = Some(error_log(&errs));
            }
        }
    }
    let final_issues = if converged {
        job.artifacts.issue_history.last().cloned().unwrap_or_default()
    } else {
        run_lints(&scene)
    };
    let halted = !converged && !final_issues.is_empty();
    job.artifacts.scene = Some(scene);
    Ok((rounds, halted, final_issues, added))
}

/// Icon bytes from the job first, then files under `base`.
struct JobAssets<'a> {
    lib: &'a BTreeMap<String, Vec<u8>>,
    fs: FsAssets,
}

impl AssetSource for JobAssets<'_> {
    fn load(&self, id: &str, path: &str) -> Result<Vec<u8>, String> {
        match self.lib.get(id) {
            Some(b) => Ok(b.clone()),
            None => self.fs.load(id, path),
        }
    }
}

pub fn run(job: &mut PipelineJob, services: &mut Services<'_>) -> Result<(Option<FigureArchive>, PipelineReport), PipelineError> {
    plan(job, services)?;
    build_assets(job, services)?;
    let (debug_turns, added_a) = assemble(job, services)?;
    let mut report = PipelineReport {
        debug_turns,
        executable: job.artifacts.scene.is_some(),
        ledger_added: added_a,
        ..Default::default()
    };
    if !report.executable {
        return Ok((None, report));
    }
    let (rounds, halted, issues, added_r) = refine(job, services)?;
    report.refine_rounds = rounds;
    report.refine_halted = halted;
    report.final_issue_count = issues.len();
    report.ledger_added += added_r;
    for i in issues.iter() {
        *report.lint_stats.entry(i.category).or_insert(0) += 1;
    }
    let scene = job.artifacts.scene.as_ref().expect("executable scene");
    let assets = JobAssets {
        lib: &job.artifacts.asset_lib,
        fs: FsAssets::new(job.config.asset_dir.clone().unwrap_or_else(|| PathBuf::from("."))),
    };
    let archive = emit_with(scene, &assets)?;
    job.artifacts.archive = Some(archive.clone());
    Ok((Some(archive), report))
}
