//! The `figforge` command line.

pub mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use figforge_core::assets::{remove_background_with, slice_grid, trim_transparent, BackgroundConfig};
use figforge_core::kb::{Embedder, HashEmbedder, HttpEmbedder};
use figforge_core::pipeline::{
    self, EndpointConfig, ExperienceLedger, HttpImageClient, HttpModelClient, ImageClient, ModelClient, ScriptedMock,
};
use figforge_core::pptx::FsAssets;
use figforge_core::render::{rasterize, render_svg};
use figforge_core::{
    diff_report, edit_distance, emit_with, parse_blueprint, route_all, run_lints, KnowledgeBase, OfflineTransport,
    PipelineConfig, PipelineJob, RasterImage, RouterConfig, Scene, Services, Transport,
};

use config::{CliConfig, EmbedderKind};

#[derive(Debug, Parser)]
#[command(name = "figforge", version, about = "Compile, inspect and generate editable figure archives")]
pub struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// Refuse every network operation.
    #[arg(long, global = true)]
    pub offline: bool,
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Blueprint DSL to .pptx.
    Compile {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Directory icon paths are resolved against (default: the input's directory).
        #[arg(long)]
        assets: Option<PathBuf>,
    },
    /// SVG snapshot of a blueprint or archive.
    Render {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Also rasterize to this PNG with the configured command.
        #[arg(long)]
        png: Option<PathBuf>,
        /// Shell command with {input} and {output} placeholders.
        #[arg(long)]
        rasterize_command: Option<String>,
    },
    /// Deterministic issue list for a blueprint or archive.
    Lint { input: PathBuf },
    /// Element-level edit distance between two archives.
    Diff { a: PathBuf, b: PathBuf },
    /// Reference knowledge base.
    Kb {
        #[command(subcommand)]
        command: KbCommand,
    },
    /// Icon post-processing.
    Assets {
        #[command(subcommand)]
        command: AssetsCommand,
    },
    /// Full generation loop from a method description.
    Run(RunArgs),
}

#[derive(Debug, Subcommand)]
pub enum KbCommand {
    /// Index a JSONL record file into a directory.
    Build {
        records: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Top-k records for a query.
    Query {
        dir: PathBuf,
        text: String,
        #[arg(short, default_value_t = figforge_core::kb::DEFAULT_K)]
        k: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum AssetsCommand {
    /// Cut an icon grid into tiles, optionally cleaning each.
    Slice {
        input: PathBuf,
        #[arg(long)]
        rows: u32,
        #[arg(long)]
        cols: u32,
        #[arg(short, long)]
        output: PathBuf,
        /// Remove background and trim each tile.
        #[arg(long)]
        clean: bool,
    },
    /// Background removal.
    Debg {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = BackgroundConfig::default().threshold)]
        threshold: u8,
        #[arg(long, default_value_t = BackgroundConfig::default().spread)]
        spread: u8,
        /// Also crop to the opaque bounding box.
        #[arg(long)]
        trim: bool,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Method description; use --input-file for longer text.
    pub text: Option<String>,
    #[arg(long, conflicts_with = "text")]
    pub input_file: Option<PathBuf>,
    #[arg(short, long, default_value = "figure.pptx")]
    pub output: PathBuf,
    /// JSON script of canned model replies.
    #[arg(long)]
    pub mock: Option<PathBuf>,
    /// JSON script of canned critic replies.
    #[arg(long)]
    pub critic_mock: Option<PathBuf>,
    #[arg(long)]
    pub kb: Option<PathBuf>,
    #[arg(long)]
    pub ledger: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub t_max: Option<usize>,
    #[arg(long)]
    pub refine_max: Option<usize>,
}

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub details: Value,
}

impl CliError {
    fn new(message: impl Into<String>) -> CliError {
        CliError {
            message: message.into(),
            details: Value::Null,
        }
    }
}

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> CliError {
        CliError::new(e.to_string())
    }
}

type CmdResult = Result<(Value, String), CliError>;

struct Ctx<'a> {
    config: CliConfig,
    offline: bool,
    transport: &'a dyn Transport,
}

/// Parses `argv` (program name first), runs the command, returns the exit code.
pub fn dispatch(argv: &[String], transport: &dyn Transport, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                return 2;
            }
            let _ = write!(stdout, "{text}");
            return 0;
        }
    };
    let config = match &cli.config {
        Some(p) => match CliConfig::load(p) {
            Ok(c) => c,
            Err(e) => return fail(cli.json, &CliError::new(e), stdout, stderr),
        },
        None => CliConfig::default(),
    };
    let offline = cli.offline || config.offline;
    let offline_transport = OfflineTransport;
    let ctx = Ctx {
        config,
        offline,
        transport: if offline { &offline_transport } else { transport },
    };
    let result = match &cli.command {
        Command::Compile { input, output, assets } => compile(input, output, assets.as_deref()),
        Command::Render {
            input,
            output,
            png,
            rasterize_command,
        } => render(&ctx, input, output, png.as_deref(), rasterize_command.as_deref()),
        Command::Lint { input } => lint(input),
        Command::Diff { a, b } => diff(a, b),
        Command::Kb { command } => kb(&ctx, command),
        Command::Assets { command } => assets(command),
        Command::Run(args) => run(&ctx, args),
    };
    match result {
        Ok((value, text)) => {
            if cli.json {
                let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&value).expect("json"));
            } else {
                let _ = write!(stdout, "{text}");
            }
            0
        }
        Err(e) => fail(cli.json, &e, stdout, stderr),
    }
}

fn fail(json: bool, e: &CliError, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    if json {
        let v = json!({"error": e.message, "details": e.details});
        let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&v).expect("json"));
    }
    let _ = writeln!(stderr, "error: {}", e.message);
    1
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::new(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::new(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::new(format!("{}: {e}", path.display())))
}

fn is_archive(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pptx"))
}

/// A routed scene from either a blueprint or an archive, plus warnings.
fn load_scene(path: &Path) -> Result<(Scene, Vec<String>), CliError> {
    let bytes = read(path)?;
    if is_archive(path) {
        let parsed = figforge_core::pptx::parse(&bytes)?;
        let warnings = parsed
            .foreign
            .iter()
            .map(|f| format!("ignoring {} element not written by figforge", f.element_type))
            .collect();
        return Ok((parsed.scene, warnings));
    }
    let text = String::from_utf8(bytes).map_err(|e| CliError::new(format!("{}: {e}", path.display())))?;
    match parse_blueprint(&text) {
        Ok(bp) => Ok((route_all(&bp.scene, &RouterConfig::default()), bp.warnings)),
        Err(errs) => Err(CliError {
            message: format!("{} is not a valid blueprint:\n{errs}", path.display()),
            details: json!({"errors": errs.0}),
        }),
    }
}

fn warning_text(warnings: &[String]) -> String {
    warnings.iter().map(|w| format!("warning: {w}\n")).collect()
}

fn compile(input: &Path, output: &Path, assets: Option<&Path>) -> CmdResult {
    let (scene, warnings) = load_scene(input)?;
    let base = assets
        .map(Path::to_path_buf)
        .or_else(|| input.parent().map(Path::to_path_buf))
        .unwrap_or_default();
    let archive = emit_with(&scene, &FsAssets::new(base))?;
    write(output, &archive.bytes)?;
    let value = json!({
        "output": output.display().to_string(),
        "nodes": scene.nodes.len(),
        "connectors": scene.connectors.len(),
        "warnings": warnings,
    });
    let text = format!(
        "{}wrote {} ({} nodes, {} connectors)\n",
        warning_text(&warnings),
        output.display(),
        scene.nodes.len(),
        scene.connectors.len()
    );
    Ok((value, text))
}

fn render(ctx: &Ctx, input: &Path, output: &Path, png: Option<&Path>, command: Option<&str>) -> CmdResult {
    let (scene, warnings) = load_scene(input)?;
    let artifact = render_svg(&scene)?;
    write(output, artifact.svg.as_bytes())?;
    let mut text = format!("{}wrote {}\n", warning_text(&warnings), output.display());
    if let Some(png) = png {
        let cmd = command
            .map(str::to_string)
            .or_else(|| ctx.config.pipeline.rasterize_command.clone())
            .ok_or_else(|| CliError::new("--png needs --rasterize-command or pipeline.rasterize_command"))?;
        rasterize(&artifact.svg, &cmd, png)?;
        text.push_str(&format!("wrote {}\n", png.display()));
    }
    let value = json!({
        "output": output.display().to_string(),
        "png": png.map(|p| p.display().to_string()),
        "elements": artifact.element_extents.len(),
        "warnings": warnings,
    });
    Ok((value, text))
}

fn lint(input: &Path) -> CmdResult {
    let (scene, warnings) = load_scene(input)?;
    let issues = run_lints(&scene);
    let text = if issues.is_empty() {
        format!("{}no issues\n", warning_text(&warnings))
    } else {
        format!("{}{}", warning_text(&warnings), issues.serialize())
    };
    Ok((json!({"count": issues.len(), "issues": issues, "warnings": warnings}), text))
}

fn diff(a: &Path, b: &Path) -> CmdResult {
    let report = edit_distance(&read(a)?, &read(b)?)?;
    Ok((serde_json::to_value(&report)?, diff_report(&report)))
}

fn embedder<'a>(ctx: &'a Ctx) -> Result<Box<dyn Embedder + 'a>, CliError> {
    match (ctx.config.embedder, ctx.offline) {
        (EmbedderKind::Http, false) => {
            let config = ctx
                .config
                .embedding
                .clone()
                .ok_or_else(|| CliError::new("embedder = \"http\" needs an [embedding] section"))?;
            Ok(Box::new(HttpEmbedder {
                config,
                transport: ctx.transport,
            }))
        }
        _ => Ok(Box::new(HashEmbedder::default())),
    }
}

fn kb(ctx: &Ctx, command: &KbCommand) -> CmdResult {
    let embed = embedder(ctx)?;
    match command {
        KbCommand::Build { records, output } => {
            let records = figforge_core::kb::ingest(records)?;
            let kb = KnowledgeBase::build(records, embed.as_ref())?;
            kb.save(output)?;
            let value = json!({"records": kb.records.len(), "dim": kb.caption.dim, "output": output.display().to_string()});
            Ok((value, format!("indexed {} records into {}\n", kb.records.len(), output.display())))
        }
        KbCommand::Query { dir, text, k } => {
            let kb = KnowledgeBase::load(dir)?;
            let (index, hits) = kb.retrieve(text, *k, embed.as_ref())?;
            let mut out = format!("index: {}\n", index.as_str());
            let rows: Vec<Value> = hits
                .iter()
                .map(|(r, score)| {
                    out.push_str(&format!("{score:.6}  {}  {}\n", r.id, r.caption));
                    json!({"id": r.id, "score": score, "caption": r.caption, "figure_ref": r.figure_ref})
                })
                .collect();
            Ok((json!({"index": index, "hits": rows}), out))
        }
    }
}

fn assets(command: &AssetsCommand) -> CmdResult {
    match command {
        AssetsCommand::Slice {
            input,
            rows,
            cols,
            output,
            clean,
        } => {
            let img = RasterImage::decode_png(&read(input)?)?;
            let tiles = slice_grid(&img, *rows, *cols)?;
            let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("tile");
            let mut paths = Vec::new();
            for (k, tile) in tiles.iter().enumerate() {
                let tile = if *clean {
                    trim_transparent(&remove_background_with(tile, &BackgroundConfig::default()))
                } else {
                    tile.clone()
                };
                let p = output.join(format!("{stem}_r{}_c{}.png", k as u32 / cols, k as u32 % cols));
                write(&p, &tile.encode_png()?)?;
                paths.push(p.display().to_string());
            }
            let text: String = paths.iter().map(|p| format!("wrote {p}\n")).collect();
            Ok((json!({"tiles": paths}), text))
        }
        AssetsCommand::Debg {
            input,
            output,
            threshold,
            spread,
            trim,
        } => {
            let img = RasterImage::decode_png(&read(input)?)?;
            let cfg = BackgroundConfig {
                threshold: *threshold,
                spread: *spread,
            };
            let mut out = remove_background_with(&img, &cfg);
            if *trim {
                out = trim_transparent(&out);
            }
            write(output, &out.encode_png()?)?;
            let value = json!({"output": output.display().to_string(), "width": out.width, "height": out.height});
            Ok((value, format!("wrote {} ({}x{})\n", output.display(), out.width, out.height)))
        }
    }
}

fn endpoint(section: &Option<EndpointConfig>, name: &str) -> Result<EndpointConfig, CliError> {
    section
        .clone()
        .ok_or_else(|| CliError::new(format!("no [{name}] endpoint configured; pass --mock or add one to --config")))
}

fn load_mock(path: &Path) -> Result<ScriptedMock, CliError> {
    let text = String::from_utf8(read(path)?)?;
    ScriptedMock::from_json(&text).map_err(|e| CliError::new(format!("{}: {e}", path.display())))
}

fn timestamp(mocked: bool) -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.parse().ok()) {
        return t;
    }
    if mocked {
        return 0;
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

fn run(ctx: &Ctx, args: &RunArgs) -> CmdResult {
    let input = match (&args.text, &args.input_file) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => String::from_utf8(read(p)?)?,
        (None, None) => return Err(CliError::new("run needs a method description or --input-file")),
    };
    let p = &ctx.config.pipeline;
    let defaults = PipelineConfig::default();
    let config = PipelineConfig {
        k: p.k.unwrap_or(defaults.k),
        t_max: args.t_max.or(p.t_max).unwrap_or(defaults.t_max),
        refine_max: args.refine_max.or(p.refine_max).unwrap_or(defaults.refine_max),
        select_tokens: p.select_tokens.unwrap_or(defaults.select_tokens),
        rasterize_command: p.rasterize_command.clone(),
        asset_dir: p.asset_dir.clone(),
        offline: ctx.offline,
        timestamp: timestamp(args.mock.is_some()),
        ..defaults
    };

    let mock = args.mock.as_deref().map(load_mock).transpose()?;
    let http_model;
    let model: &dyn ModelClient = match &mock {
        Some(m) => m,
        None => {
            http_model = HttpModelClient {
                config: endpoint(&ctx.config.model, "model")?,
                transport: ctx.transport,
            };
            &http_model
        }
    };
    let critic_mock = args.critic_mock.as_deref().map(load_mock).transpose()?;
    let http_critic = match (&critic_mock, &ctx.config.critic, mock.is_some()) {
        (None, Some(c), false) => Some(HttpModelClient {
            config: c.clone(),
            transport: ctx.transport,
        }),
        _ => None,
    };
    let critic: Option<&dyn ModelClient> = match (&critic_mock, &http_critic) {
        (Some(m), _) => Some(m),
        (None, Some(c)) => Some(c),
        _ => None,
    };
    let http_image = match (&ctx.config.image, mock.is_some()) {
        (Some(c), false) => Some(HttpImageClient {
            config: c.clone(),
            transport: ctx.transport,
        }),
        _ => None,
    };
    let image = http_image.as_ref().map(|c| c as &dyn ImageClient);

    let embed = embedder(ctx)?;
    let kb_dir = args.kb.clone().or_else(|| ctx.config.kb.clone());
    let kb = kb_dir.as_deref().map(KnowledgeBase::load).transpose()?;
    let ledger_path = args.ledger.clone().or_else(|| ctx.config.ledger.clone());
    let mut ledger = match &ledger_path {
        Some(p) => ExperienceLedger::open(p)?,
        None => ExperienceLedger::in_memory(),
    };

    let mut job = PipelineJob::new(input, config);
    let mut services = Services {
        model,
        critic,
        image,
        kb: kb.as_ref().map(|k| (k, embed.as_ref())),
        ledger: &mut ledger,
    };
    let outcome = pipeline::run(&mut job, &mut services);
    if let Some(t) = &args.transcript {
        write(t, job.transcript_jsonl().as_bytes())?;
    }
    if ledger_path.is_some() {
        ledger.save()?;
    }
    let (archive, report) = outcome.map_err(|e| CliError {
        message: e.to_string(),
        details: json!({"stage": e.stage(), "notices": job.notices}),
    })?;
    if let Some(a) = &archive {
        write(&args.output, &a.bytes)?;
    }
    if let (Some(svg_path), Some(svg)) = (&args.svg, &job.artifacts.snapshot) {
        write(svg_path, svg.as_bytes())?;
    }
    let value = json!({
        "output": archive.as_ref().map(|_| args.output.display().to_string()),
        "report": report,
        "retrieved": job.artifacts.retrieved.iter().map(|r| &r.id).collect::<Vec<_>>(),
        "notices": job.notices,
    });
    if let Some(r) = &args.report {
        write(r, format!("{}\n", serde_json::to_string_pretty(&value)?).as_bytes())?;
    }
    let mut text: String = job.notices.iter().map(|n| format!("note: {n}\n")).collect();
    text.push_str(&format!(
        "debug turns: {}\nrefine rounds: {}\nremaining issues: {}\n",
        report.debug_turns, report.refine_rounds, report.final_issue_count
    ));
    match &archive {
        Some(_) => text.push_str(&format!("wrote {}\n", args.output.display())),
        None => {
            return Err(CliError {
                message: format!("no executable blueprint after {} repair turns", report.debug_turns),
                details: value,
            })
        }
    }
    Ok((value, text))
}
