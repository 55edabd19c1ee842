//! Pipeline driver: generate scenes, attach questions, balance and split
//! manifests, report statistics, and score predictions.
//!
//! Subcommands are independent stages sharing the on-disk layout:
//!
//! ```text
//! out/
//!   generation.json            resolved config + hash + seed
//!   run_log.json               per-attempt outcomes
//!   scenes/<scene_id>/
//!     view<k>.png              rendered RGB view
//!     view<k>.seg.png          16-bit instance segmentation map
//!     scene.json               full raw scene description
//!     validation.json          contrast report
//! ```
//!
//! Exit codes: 0 success, 2 config error, 3 generation failure, 4 I/O
//! error, 5 data/schema error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use scenecount::config::{
    config_digest, parse_config, sample_scene_spec, GenerationConfig, TOY_CONFIG_JSON,
};
use scenecount::contrast::{validate_and_repair, ContrastError};
use scenecount::dataset::{
    assemble, balance, build_test_split, read_manifest, write_manifest, AssembleOptions,
    BalanceProfile, DatasetError, Provenance,
};
use scenecount::eval::{evaluate, read_predictions, EvalError};
use scenecount::qa::{generate_questions, qa_rng, QAItem, SkippedQuestion, TemplateSet};
use scenecount::render::{render_scene_all_views, visible_pixel_counts, write_png};
use scenecount::scene::{build_scene, derive_metadata, SceneGraph};

#[derive(Parser)]
#[command(name = "scenecount", version, about = "Synthetic counting VQA dataset pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate validated scenes: images, segmentation maps, and reports.
    Generate(GenerateArgs),
    /// Attach counting questions to generated scenes and build a manifest.
    Qa(QaArgs),
    /// Subsample answer classes toward the training distribution profile.
    Balance(BalanceArgs),
    /// Carve a scene-disjoint test split with fixed per-class counts.
    Split(SplitArgs),
    /// Print manifest statistics.
    Stats(StatsArgs),
    /// Score a predictions file against a manifest.
    Eval(EvalArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// JSON configuration file.
    #[arg(long, conflicts_with = "toy")]
    config: Option<PathBuf>,
    /// Use the built-in toy preset (128x72, 1 spp, 2 cameras).
    #[arg(long)]
    toy: bool,
    /// Number of accepted scenes to produce.
    #[arg(long, default_value_t = 10)]
    scenes: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct QaArgs {
    /// Scenes directory (the generate output dir, or its scenes/ subdir).
    #[arg(long)]
    scenes: PathBuf,
    /// Output manifest path (JSONL).
    #[arg(long)]
    out: PathBuf,
    /// Maximum questions kept per image.
    #[arg(long, default_value_t = 4)]
    budget: usize,
    /// Probability of keeping each adversarial item.
    #[arg(long, default_value_t = 1.0)]
    adversarial_keep: f64,
    /// Custom question template file (JSON).
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Seed for budgeting draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BalanceArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Custom balance profile (JSON map of class -> target).
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    test_out: PathBuf,
    #[arg(long)]
    train_out: PathBuf,
    /// Test items per answer class.
    #[arg(long, default_value_t = 31)]
    per_class: u32,
    /// Highest answer class in the test split.
    #[arg(long, default_value_t = 15)]
    max_class: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Predictions file: JSONL of {item_id, raw_answer}.
    #[arg(long)]
    preds: PathBuf,
    #[arg(long, default_value_t = 15)]
    max_class: u32,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

/// Errors carrying their process exit code.
#[derive(Debug)]
enum CliError {
    Config(String),
    Generation(String),
    Io(String),
    Schema(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Generation(_) => 3,
            CliError::Io(_) => 4,
            CliError::Schema(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Generation(m) | CliError::Io(m) | CliError::Schema(m) => m,
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::Io { .. } => CliError::Io(e.to_string()),
            DatasetError::Schema { .. } | DatasetError::SplitShortfall { .. } => {
                CliError::Schema(e.to_string())
            }
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Schema(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Qa(args) => cmd_qa(args),
        Command::Balance(args) => cmd_balance(args),
        Command::Split(args) => cmd_split(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Eval(args) => cmd_eval(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

/// Resolved config written next to the generated scenes.
#[derive(Serialize, Deserialize)]
struct GenerationInfo {
    config_hash: String,
    seed: u64,
    config: GenerationConfig,
}

#[derive(Serialize)]
struct RunLog {
    requested: u64,
    accepted: u64,
    attempts: Vec<AttemptLog>,
    elapsed_ms: u128,
}

#[derive(Serialize, Clone)]
struct AttemptLog {
    scene_index: u64,
    scene_id: String,
    outcome: String,
    retries_used: Option<u32>,
    millis: u128,
}

enum AttemptOutcome {
    Accepted(Box<scenecount::contrast::ValidatedScene>),
    Rejected(String),
}

struct Attempt {
    scene_index: u64,
    scene_id: String,
    outcome: AttemptOutcome,
    millis: u128,
}

/// Runs one scene attempt end to end: sample, build, render, visibility
/// check, contrast validation with repair.
fn attempt_scene(config: &GenerationConfig, scene_index: u64) -> Attempt {
    let start = Instant::now();
    let spec = sample_scene_spec(config, scene_index);
    let scene_id = spec.scene_id.clone();
    let done = |outcome: AttemptOutcome, start: Instant| Attempt {
        scene_index,
        scene_id: scene_id.clone(),
        outcome,
        millis: start.elapsed().as_millis(),
    };

    let scene = match build_scene(&spec) {
        Ok(scene) => scene,
        Err(e) => return done(AttemptOutcome::Rejected(format!("placement: {e}")), start),
    };
    let outputs = match render_scene_all_views(&scene, &config.image) {
        Ok(outputs) => outputs,
        Err(e) => return done(AttemptOutcome::Rejected(format!("render: {e}")), start),
    };
    let counts = visible_pixel_counts(&outputs, scene.objects.len());
    if let Some((i, &c)) = counts
        .iter()
        .enumerate()
        .find(|(_, &c)| c < u64::from(config.validation.min_visible_pixels))
    {
        return done(
            AttemptOutcome::Rejected(format!(
                "visibility: object {} owns {c} pixels (< {})",
                i + 1,
                config.validation.min_visible_pixels
            )),
            start,
        );
    }
    match validate_and_repair(scene, outputs, config) {
        Ok(validated) => done(AttemptOutcome::Accepted(Box::new(validated)), start),
        Err(e @ ContrastError::Rejected { .. }) => {
            done(AttemptOutcome::Rejected(format!("contrast: {e}")), start)
        }
        Err(e) => done(AttemptOutcome::Rejected(format!("validation: {e}")), start),
    }
}

fn write_scene_dir(
    scenes_dir: &Path,
    validated: &scenecount::contrast::ValidatedScene,
) -> Result<(), CliError> {
    let dir = scenes_dir.join(&validated.scene.scene_id);
    std::fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
    for output in &validated.outputs {
        let path = dir.join(format!("view{}.png", output.camera_index));
        write_png(output, &path).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let scene_path = dir.join("scene.json");
    let scene_text = serde_json::to_string_pretty(&validated.scene).expect("scene serializes");
    std::fs::write(&scene_path, scene_text).map_err(|e| io_error(&scene_path, e))?;
    let report_path = dir.join("validation.json");
    let report_text = serde_json::to_string_pretty(&validated.report).expect("report serializes");
    std::fs::write(&report_path, report_text).map_err(|e| io_error(&report_path, e))?;
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let config_text = match (&args.config, args.toy) {
        (Some(path), _) => std::fs::read_to_string(path).map_err(|e| io_error(path, e))?,
        (None, true) => TOY_CONFIG_JSON.to_string(),
        (None, false) => {
            return Err(CliError::Config("pass --config <path> or --toy".to_string()))
        }
    };
    let mut config = parse_config(&config_text).map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.jobs)
            .build_global()
            .map_err(|e| CliError::Generation(format!("thread pool: {e}")))?;
    }

    let started = Instant::now();
    let scenes_dir = args.out.join("scenes");
    std::fs::create_dir_all(&scenes_dir).map_err(|e| io_error(&scenes_dir, e))?;
    let info = GenerationInfo {
        config_hash: config_digest(&config_text),
        seed: config.seed,
        config: config.clone(),
    };
    let info_path = args.out.join("generation.json");
    std::fs::write(
        &info_path,
        serde_json::to_string_pretty(&info).expect("info serializes"),
    )
    .map_err(|e| io_error(&info_path, e))?;

    let attempt_cap = args.scenes.saturating_mul(20) + 50;
    let mut accepted = 0u64;
    let mut next_index = 0u64;
    let mut attempts: Vec<AttemptLog> = Vec::new();
    while accepted < args.scenes && next_index < attempt_cap {
        let remaining = args.scenes - accepted;
        let batch_end = (next_index + remaining.max(1) * 2).min(attempt_cap);
        let batch: Vec<u64> = (next_index..batch_end).collect();
        next_index = batch_end;

        let results: Vec<Attempt> =
            batch.par_iter().map(|&i| attempt_scene(&config, i)).collect();
        for result in results {
            if accepted == args.scenes {
                break;
            }
            let (outcome_str, retries) = match &result.outcome {
                AttemptOutcome::Accepted(v) => {
                    write_scene_dir(&scenes_dir, v)?;
                    accepted += 1;
                    log::info!("accepted {} ({accepted}/{})", result.scene_id, args.scenes);
                    ("accepted".to_string(), Some(v.report.retries_used))
                }
                AttemptOutcome::Rejected(reason) => {
                    log::info!("rejected {}: {reason}", result.scene_id);
                    (format!("rejected: {reason}"), None)
                }
            };
            attempts.push(AttemptLog {
                scene_index: result.scene_index,
                scene_id: result.scene_id,
                outcome: outcome_str,
                retries_used: retries,
                millis: result.millis,
            });
        }
    }

    let run_log = RunLog {
        requested: args.scenes,
        accepted,
        attempts,
        elapsed_ms: started.elapsed().as_millis(),
    };
    let log_path = args.out.join("run_log.json");
    std::fs::write(
        &log_path,
        serde_json::to_string_pretty(&run_log).expect("log serializes"),
    )
    .map_err(|e| io_error(&log_path, e))?;

    if accepted < args.scenes {
        return Err(CliError::Generation(format!(
            "only {accepted}/{} scenes accepted within {attempt_cap} attempts; see {}",
            args.scenes,
            log_path.display()
        )));
    }
    println!(
        "accepted {accepted} scenes into {} in {:.1}s",
        scenes_dir.display(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

/// Accepts either the generate output dir or its scenes/ subdir.
fn resolve_scenes_dir(dir: &Path) -> PathBuf {
    let nested = dir.join("scenes");
    if nested.is_dir() {
        nested
    } else {
        dir.to_path_buf()
    }
}

fn load_generation_info(scenes_dir: &Path) -> Option<GenerationInfo> {
    for candidate in [
        scenes_dir.join("generation.json"),
        scenes_dir.parent()?.join("generation.json"),
    ] {
        if let Ok(text) = std::fs::read_to_string(&candidate) {
            if let Ok(info) = serde_json::from_str(&text) {
                return Some(info);
            }
        }
    }
    None
}

fn cmd_qa(args: QaArgs) -> Result<(), CliError> {
    let scenes_dir = resolve_scenes_dir(&args.scenes);
    let templates = match &args.templates {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            TemplateSet::from_json(&text).map_err(|e| CliError::Schema(e.to_string()))?
        }
        None => TemplateSet::builtin(),
    };
    let info = load_generation_info(&scenes_dir);
    let palette = info
        .as_ref()
        .map(|i| i.config.objects.color_palette.clone())
        .unwrap_or_else(|| GenerationConfig::builtin_default().objects.color_palette);

    let mut scene_dirs: Vec<PathBuf> = std::fs::read_dir(&scenes_dir)
        .map_err(|e| io_error(&scenes_dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    scene_dirs.sort();
    if scene_dirs.is_empty() {
        return Err(CliError::Schema(format!(
            "no scene directories under {}",
            scenes_dir.display()
        )));
    }

    let mut items: Vec<QAItem> = Vec::new();
    let mut skipped: Vec<SkippedQuestion> = Vec::new();
    for dir in &scene_dirs {
        let scene_path = dir.join("scene.json");
        let text = std::fs::read_to_string(&scene_path).map_err(|_| {
            CliError::Schema(format!("missing or unreadable scene.json in {}", dir.display()))
        })?;
        let scene: SceneGraph = serde_json::from_str(&text).map_err(|e| {
            CliError::Schema(format!("corrupt scene description {}: {e}", scene_path.display()))
        })?;
        let metadata = derive_metadata(&scene);
        for view in 0..scene.cameras.len() {
            let image_ref = format!("{}/view{view}.png", scene.scene_id);
            let mut rng = qa_rng(&scene, view);
            let outcome = generate_questions(
                &metadata,
                &scene,
                &image_ref,
                view,
                &templates,
                &palette,
                &mut rng,
            );
            items.extend(outcome.items);
            skipped.extend(outcome.skipped);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let opts = AssembleOptions {
        per_image_budget: args.budget,
        adversarial_keep_probability: args.adversarial_keep,
    };
    let provenance = Provenance::new(
        info.map(|i| i.config_hash).unwrap_or_else(|| "unknown".to_string()),
        args.seed,
    );
    let manifest = assemble(items, &opts, &mut rng, provenance);
    write_manifest(&manifest, &args.out)?;

    if !skipped.is_empty() {
        let mut log = String::new();
        for s in &skipped {
            log.push_str(&format!("{}\t{}\t{}\n", s.image_ref, s.question_type, s.reason));
        }
        let skip_path = args.out.with_extension("skipped.log");
        std::fs::write(&skip_path, log).map_err(|e| io_error(&skip_path, e))?;
    }
    println!(
        "wrote {} items across {} scenes to {} ({} skipped question slots)",
        manifest.items.len(),
        scene_dirs.len(),
        args.out.display(),
        skipped.len()
    );
    Ok(())
}

fn cmd_balance(args: BalanceArgs) -> Result<(), CliError> {
    let manifest = read_manifest(&args.manifest)?;
    let profile = match &args.profile {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("profile: {e}")))?
        }
        None => BalanceProfile::default_training(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (balanced, report) = balance(&manifest, &profile, &mut rng);
    write_manifest(&balanced, &args.out)?;
    println!(
        "balanced {} -> {} items into {}",
        manifest.items.len(),
        balanced.items.len(),
        args.out.display()
    );
    for (class, missing) in &report.shortfalls {
        println!("  class {class}: short by {missing}");
    }
    Ok(())
}

fn cmd_split(args: SplitArgs) -> Result<(), CliError> {
    let pool = read_manifest(&args.manifest)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (test, train) = build_test_split(&pool, 0..=args.max_class, args.per_class, &mut rng)?;
    write_manifest(&test, &args.test_out)?;
    write_manifest(&train, &args.train_out)?;
    println!(
        "test: {} items -> {}; train pool: {} items -> {}",
        test.items.len(),
        args.test_out.display(),
        train.items.len(),
        args.train_out.display()
    );
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<(), CliError> {
    let manifest = read_manifest(&args.manifest)?;
    let stats = manifest.stats();
    if args.json {
        println!("{}", serde_json::to_string_pretty(&stats).expect("stats serialize"));
    } else {
        print!("{stats}");
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let manifest = read_manifest(&args.manifest)?;
    let preds = read_predictions(&args.preds)?;
    let report = evaluate(&preds, &manifest, args.max_class)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serialize"));
    } else {
        print!("{}", report.to_text());
    }
    Ok(())
}
