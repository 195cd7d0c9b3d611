//! Offline experiment commands over dataset manifests.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use super::runtime::Runtime;
use super::{ablation_from_flags, CliError, GlobalArgs, MockFixture, MockServer, EXIT_OK, EXIT_PARTIAL};
use crate::dataset::{
    build_icon_dataset, load_captions, load_rico_dir, load_splits, read_manifest, sample_finetune_subset, sample_r1,
    write_manifest, AnnotatedIcon, BuildReport, DatasetStats, Split,
};
use crate::genai::{account_costs, export_finetune_dataset, FinetuneExample, ImagePart, Provenance, PER_CLASS_CAP};
use crate::metrics::{
    evaluate, read_eval_records, render_ablation_table, render_table, run_ablation_suite, EvalRecord, MetricConfig,
    SynonymTable,
};
use crate::pipeline::Pipeline;
use crate::ui_model::{AblationConfig, AltTextResult, GenerationMode, ImageScope, ModelVariant};
use crate::vision::encode_png;

#[derive(Debug, Clone, Args)]
pub struct RawInputs {
    /// Directory of Rico view-hierarchy JSON files.
    #[arg(long)]
    pub rico: Option<PathBuf>,
    /// Caption CSV: screen_id,left,top,right,bottom,captions.
    #[arg(long)]
    pub captions: Option<PathBuf>,
    /// Split CSV: screen_id,split.
    #[arg(long)]
    pub splits: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub inputs: RawInputs,
    /// Keep one random label per train/valid icon.
    #[arg(long)]
    pub r1: bool,
    /// Output manifest (JSON lines).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    #[arg(long, conflicts_with_all = ["rico", "captions", "splits"])]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub inputs: RawInputs,
    #[arg(long)]
    pub r1: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SplitSelect {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, default_value = "test")]
    pub split: Split,
    /// Use only the first N icons of the split.
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub select: SplitSelect,
    /// Predictions file (JSON lines of icon_ref, candidate, references).
    #[arg(long)]
    pub out: PathBuf,
    /// Write the cost summary here.
    #[arg(long)]
    pub cost_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Score an existing predictions file instead of generating.
    #[arg(long, conflicts_with = "manifest")]
    pub predictions: Option<PathBuf>,
    #[command(flatten)]
    pub select: SplitSelect,
    /// Metric report (JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub cost_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    pub select: SplitSelect,
    /// Grid report (JSON).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Records per icon class, at most 15.
    #[arg(long, default_value_t = PER_CLASS_CAP)]
    pub cap: usize,
    /// Fine-tuning file (JSON lines); the config lands next to it.
    #[arg(long)]
    pub out: PathBuf,
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn build_from_raw(inputs: &RawInputs, global: &GlobalArgs, r1: bool) -> Result<(Vec<AnnotatedIcon>, BuildReport), CliError> {
    let need = |p: &Option<PathBuf>, flag: &str| p.clone().ok_or_else(|| CliError::Usage(format!("--{flag} is required")));
    let rico = need(&inputs.rico, "rico")?;
    let captions = load_captions(&need(&inputs.captions, "captions")?).map_err(usage)?;
    let splits = load_splits(&need(&inputs.splits, "splits")?).map_err(usage)?;
    let cfg = global.tool_config()?;
    let (screens, diags) = load_rico_dir(&rico).map_err(usage)?;
    for d in diags {
        log::warn!("{d}");
    }
    let build = build_icon_dataset(&screens, &captions, &splits, &cfg.size_filter);
    let icons = if r1 { sample_r1(&build.icons, cfg.seed) } else { build.icons };
    Ok((icons, build.report))
}

fn render_stats(stats: &DatasetStats) -> String {
    let mut out = format!("{:<8} {:>8} {:>8}\n", "split", "icons", "labels");
    for (name, c) in [("train", stats.train), ("valid", stats.valid), ("test", stats.test), ("total", stats.total)] {
        out.push_str(&format!("{name:<8} {:>8} {:>8}\n", c.icons, c.labels));
    }
    out.push_str(&format!("screens  {:>8}\n", stats.screens));
    out
}

pub fn cmd_build_dataset(global: &GlobalArgs, args: &BuildArgs) -> Result<i32, CliError> {
    let (icons, report) = build_from_raw(&args.inputs, global, args.r1)?;
    write_manifest(&args.out, &icons).map_err(|e| CliError::Io(e.to_string()))?;
    print!("{}", render_stats(&DatasetStats::from_icons(&icons)));
    log::info!("build report: {report:?}");
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct StatsOutput {
    stats: DatasetStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    build: Option<BuildReport>,
}

pub fn cmd_stats(global: &GlobalArgs, args: &StatsArgs) -> Result<i32, CliError> {
    let (icons, build) = match &args.manifest {
        Some(m) => {
            let icons = read_manifest(m).map_err(usage)?;
            let icons = if args.r1 { sample_r1(&icons, global.tool_config()?.seed) } else { icons };
            (icons, None)
        }
        None => {
            let (icons, report) = build_from_raw(&args.inputs, global, args.r1)?;
            (icons, Some(report))
        }
    };
    let out = StatsOutput {
        stats: DatasetStats::from_icons(&icons),
        build,
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&out).map_err(|e| CliError::Io(e.to_string()))?);
    } else {
        print!("{}", render_stats(&out.stats));
    }
    Ok(EXIT_OK)
}

fn select_icons(select: &SplitSelect) -> Result<Vec<AnnotatedIcon>, CliError> {
    let manifest = select.manifest.as_ref().ok_or_else(|| CliError::Usage("--manifest is required".into()))?;
    let mut icons: Vec<AnnotatedIcon> = read_manifest(manifest).map_err(usage)?.into_iter().filter(|i| i.split == select.split).collect();
    if let Some(n) = select.limit {
        icons.truncate(n);
    }
    if icons.is_empty() {
        return Err(CliError::Usage(format!("{} has no {} icons", manifest.display(), select.split)));
    }
    Ok(icons)
}

struct Predictions {
    records: Vec<EvalRecord>,
    results: Vec<AltTextResult>,
    failures: Vec<String>,
}

fn generate_predictions(rt: &Runtime, icons: &[AnnotatedIcon], mode: GenerationMode, ablation: AblationConfig) -> Predictions {
    let outcomes = Pipeline::par_map(icons, rt.workers(), |icon| rt.pipeline.predict(icon, mode, ablation));
    let mut p = Predictions {
        records: Vec::new(),
        results: Vec::new(),
        failures: Vec::new(),
    };
    for (icon, outcome) in icons.iter().zip(outcomes) {
        match outcome {
            Ok(g) => {
                p.records.push(EvalRecord {
                    icon_ref: icon.icon_ref(),
                    candidate: g.result.alt_text.clone(),
                    references: icon.labels.clone(),
                });
                p.results.push(g.result);
            }
            Err(e) => {
                log::warn!("{}: {e}", icon.icon_ref());
                p.failures.push(format!("{}: {e}", icon.icon_ref()));
            }
        }
    }
    p
}

fn write_records(path: &Path, records: &[EvalRecord]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut body = Vec::new();
    for r in records {
        serde_json::to_writer(&mut body, r).map_err(|e| CliError::Io(e.to_string()))?;
        body.push(b'\n');
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::File::create(path).and_then(|mut f| f.write_all(&body)).map_err(io)
}

fn report_costs(results: &[AltTextResult], out: Option<&Path>) -> Result<(), CliError> {
    let summary = account_costs(results, None);
    println!(
        "cost: ${} over {} requests ({} cached)",
        summary.inference_usd, summary.fresh.requests, summary.cached.requests
    );
    if let Some(path) = out {
        write_json(path, &summary)?;
    }
    Ok(())
}

pub fn cmd_predict(global: &GlobalArgs, args: &PredictArgs) -> Result<i32, CliError> {
    let icons = select_icons(&args.select)?;
    let rt = global.runtime()?;
    let mode = global.mode(&rt.config);
    let p = generate_predictions(&rt, &icons, mode, ablation_from_flags(&rt.config.generation.ablate));
    write_records(&args.out, &p.records)?;
    report_costs(&p.results, args.cost_out.as_deref())?;
    println!("{} predicted, {} failed", p.records.len(), p.failures.len());
    Ok(if p.failures.is_empty() { EXIT_OK } else { EXIT_PARTIAL })
}

fn metric_config(synonyms: &SynonymTable) -> MetricConfig {
    MetricConfig {
        meteor_synonym_groups: synonyms.group_count(),
        ..MetricConfig::default()
    }
}

fn synonyms_for(global: &GlobalArgs) -> Result<SynonymTable, CliError> {
    let cfg = global.tool_config()?;
    match &cfg.data.synonyms {
        Some(p) => SynonymTable::load(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => Ok(SynonymTable::default()),
    }
}

pub fn cmd_eval(global: &GlobalArgs, args: &EvalArgs) -> Result<i32, CliError> {
    let synonyms = synonyms_for(global)?;
    let mut config = metric_config(&synonyms);
    let (records, failures, label) = match &args.predictions {
        Some(path) => (read_eval_records(path).map_err(usage)?, Vec::new(), "predictions".to_owned()),
        None => {
            let icons = select_icons(&args.select)?;
            let rt = global.runtime()?;
            let mode = global.mode(&rt.config);
            let ablation = ablation_from_flags(&rt.config.generation.ablate);
            let p = generate_predictions(&rt, &icons, mode, ablation);
            report_costs(&p.results, args.cost_out.as_deref())?;
            config.mode = Some(mode.to_string());
            config.ablation = Some(ablation);
            config.template_version = Some(rt.pipeline.builder.templates.version.clone());
            (p.records, p.failures, mode.to_string())
        }
    };
    let report = evaluate(&records, &config, &synonyms).map_err(usage)?;
    print!("{}", render_table(&label, &report));
    if let Some(out) = &args.out {
        write_json(out, &report)?;
    }
    for f in &failures {
        eprintln!("failed: {f}");
    }
    Ok(if failures.is_empty() { EXIT_OK } else { EXIT_PARTIAL })
}

/// The grid's modes: TextT plus MMT with the configured image scope.
pub fn ablation_modes(scope: ImageScope) -> [GenerationMode; 2] {
    [
        GenerationMode::TEXT_T,
        GenerationMode {
            variant: ModelVariant::Mmt,
            image_scope: scope,
        },
    ]
}

pub fn cmd_ablate(global: &GlobalArgs, args: &AblateArgs) -> Result<i32, CliError> {
    let icons = select_icons(&args.select)?;
    let rt = global.runtime()?;
    let synonyms = rt.synonyms()?;
    let config = MetricConfig {
        template_version: Some(rt.pipeline.builder.templates.version.clone()),
        ..metric_config(&synonyms)
    };
    let pipeline = rt.pipeline.clone();
    let predict = move |icon: &AnnotatedIcon, mode: GenerationMode, ablation: AblationConfig| {
        pipeline.predict(icon, mode, ablation).map(|g| g.result.alt_text).map_err(|e| e.to_string())
    };
    let modes = ablation_modes(rt.config.generation.image_scope);
    let report = run_ablation_suite(&icons, &modes, &AblationConfig::table_rows(), &predict, &config, &synonyms);
    write_json(&args.out, &report)?;
    print!("{}", render_ablation_table(&report));
    let partial = report.cells.iter().any(|c| !c.failures.is_empty() || c.report.is_none());
    Ok(if partial { EXIT_PARTIAL } else { EXIT_OK })
}

pub fn cmd_export_finetune(global: &GlobalArgs, args: &ExportArgs) -> Result<i32, CliError> {
    if args.cap == 0 || args.cap > PER_CLASS_CAP {
        return Err(CliError::Usage(format!("--cap must be within 1..={PER_CLASS_CAP}")));
    }
    let icons = read_manifest(&args.manifest).map_err(usage)?;
    let rt = global.runtime()?;
    let classes = rt.classes()?;
    let mode = global.mode(&rt.config);
    let seed = rt.config.seed;
    let population = icons.iter().filter(|i| i.split == Split::Train).count();
    let subset = sample_finetune_subset(&icons, &classes, args.cap, seed);
    let prepared = Pipeline::par_map(&subset, rt.workers(), |icon| -> Result<FinetuneExample, String> {
        let (images, _) = rt.pipeline.dataset_images(icon);
        let mut context = icon.context.clone();
        for d in rt.pipeline.enrich(&mut context, &images, mode) {
            log::warn!("{}: {d}", icon.icon_ref());
        }
        let img = match mode.image_scope {
            ImageScope::Icon => images.icon.as_ref(),
            ImageScope::Container => images.container.as_ref(),
        };
        let image = match (mode.is_multimodal(), img) {
            (true, Some(img)) => Some(ImagePart::png(encode_png(img).map_err(|e| e.to_string())?)),
            (true, None) => return Err("no screenshot for a multimodal example".into()),
            (false, _) => None,
        };
        let label = icon.labels.first().cloned().ok_or("icon has no label")?;
        Ok(FinetuneExample {
            icon_ref: icon.icon_ref(),
            class: classes.assign(icon.context.ui_element_info.resource_id()).to_owned(),
            context,
            image,
            label,
        })
    });
    let mut examples = Vec::new();
    let mut skipped = 0;
    for (icon, p) in subset.iter().zip(prepared) {
        match p {
            Ok(ex) => examples.push(ex),
            Err(e) => {
                skipped += 1;
                eprintln!("skipped {}: {e}", icon.icon_ref());
            }
        }
    }
    let provenance = Provenance {
        source: args.manifest.display().to_string(),
        seed: Some(seed),
        population,
        sampled: examples.len(),
    };
    let export = export_finetune_dataset(
        &examples,
        mode,
        &rt.pipeline.builder,
        &rt.config.backend.model,
        &rt.config.backend.prices,
        &provenance,
        &args.out,
    )
    .map_err(usage)?;
    println!(
        "{} records in {} classes -> {} (config {}); ~{} training tokens, ${}",
        export.records,
        export.per_class.len(),
        export.data_path.display(),
        export.config_path.display(),
        export.estimated_training_tokens,
        export.estimated_cost_usd
    );
    Ok(if skipped == 0 { EXIT_OK } else { EXIT_PARTIAL })
}

pub fn cmd_mock_serve(fixture: &Path, addr: &str) -> Result<i32, CliError> {
    let fx = MockFixture::load(fixture).map_err(CliError::Usage)?;
    let server = MockServer::start(fx, addr).map_err(CliError::Setup)?;
    println!("{}", server.endpoint());
    loop {
        std::thread::park();
    }
}
