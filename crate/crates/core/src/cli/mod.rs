//! Command-line surface: `altgen <command>`.

pub mod annotate;
pub mod config;
pub mod experiments;
pub mod mock;
pub mod runtime;
pub mod watch;

use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use annotate::{annotate, AnnotateOptions, AnnotateSummary, IconOutcome, IconStatus};
pub use config::{ablation_from_flags, AblateFlag, ConfigError, ToolConfig, WatchConfig};
pub use mock::{LoggedRequest, MockFixture, MockRule, MockServer};
pub use runtime::Runtime;
pub use watch::{WatchLog, WatchRecord, WatchSession};

use crate::ui_model::{GenerationMode, ImageScope, ModelVariant};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_SOFTWARE: i32 = 70;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Setup(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => EXIT_USAGE,
            CliError::Setup(_) | CliError::Io(_) => EXIT_SOFTWARE,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Textt,
    Mmt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Icon,
    Container,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Directory for the on-disk result cache.
    #[arg(long, global = true, value_name = "DIR")]
    pub cache: Option<PathBuf>,
    /// Serve backend requests from a fixture on a local mock server.
    #[arg(long, global = true, value_name = "FIXTURE")]
    pub mock: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, global = true, value_enum)]
    pub image_scope: Option<ScopeArg>,
    /// Withhold a context component from prompts (repeatable).
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    pub ablate: Vec<AblateFlag>,
    /// Overwrite existing contentDescription values.
    #[arg(long, global = true)]
    pub force: bool,
    /// Print would-be injections without writing.
    #[arg(long, global = true)]
    pub dry_run: bool,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Parser)]
#[command(name = "altgen", version, about = "Context-aware alt text for Android UI icons")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Add contentDescription to every icon lacking one.
    Annotate {
        /// A layout file or a project directory.
        path: PathBuf,
    },
    /// Annotate icons as they are added to layouts under a directory.
    Watch {
        dir: PathBuf,
        /// Stop after this many seconds.
        #[arg(long)]
        duration_secs: Option<u64>,
    },
    /// Join Rico screens with captions into a dataset manifest.
    BuildDataset(experiments::BuildArgs),
    /// Icon and label counts per split.
    Stats(experiments::StatsArgs),
    /// Generate alt text for a manifest split.
    Predict(experiments::PredictArgs),
    /// Score predictions against reference captions.
    Eval(experiments::EvalArgs),
    /// Score every (mode, ablation) combination.
    Ablate(experiments::AblateArgs),
    /// Write a chat-format fine-tuning file for a class-balanced subset.
    ExportFinetune(experiments::ExportArgs),
    /// Run the mock chat-completions server in the foreground.
    MockServe {
        fixture: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8089")]
        addr: String,
    },
}

impl GlobalArgs {
    /// Config file (or defaults) with command-line overrides applied.
    pub fn tool_config(&self) -> Result<ToolConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => ToolConfig::load(p)?,
            None => ToolConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(dir) = &self.cache {
            cfg.cache_dir = Some(dir.clone());
        }
        if let Some(m) = self.mode {
            cfg.generation.mode = match m {
                ModeArg::Textt => ModelVariant::TextT,
                ModeArg::Mmt => ModelVariant::Mmt,
            };
        }
        if let Some(s) = self.image_scope {
            cfg.generation.image_scope = match s {
                ScopeArg::Icon => ImageScope::Icon,
                ScopeArg::Container => ImageScope::Container,
            };
        }
        if !self.ablate.is_empty() {
            cfg.generation.ablate = self.ablate.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn runtime(&self) -> Result<Runtime, CliError> {
        Runtime::build(self.tool_config()?, self.mock.as_deref())
    }

    pub fn annotate_options(&self, cfg: &ToolConfig) -> AnnotateOptions {
        AnnotateOptions {
            mode: cfg.generation.mode(),
            ablation: ablation_from_flags(&cfg.generation.ablate),
            force: self.force,
            dry_run: self.dry_run,
        }
    }

    pub fn mode(&self, cfg: &ToolConfig) -> GenerationMode {
        cfg.generation.mode()
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp_millis()
        .try_init();
}

fn cmd_annotate(global: &GlobalArgs, path: &std::path::Path) -> Result<i32, CliError> {
    let rt = global.runtime()?;
    let options = global.annotate_options(&rt.config);
    let summary = annotate(path, &rt.pipeline, &options, rt.workers())?;
    print!("{}", summary.render());
    for o in &summary.outcomes {
        for d in &o.diagnostics {
            log::warn!("{}: {d}", o.file.display());
        }
    }
    Ok(summary.exit_code())
}

fn cmd_watch(global: &GlobalArgs, dir: &std::path::Path, duration: Option<u64>) -> Result<i32, CliError> {
    let rt = global.runtime()?;
    let options = global.annotate_options(&rt.config);
    let session = WatchSession::start(dir, rt.pipeline.clone(), options, &rt.config.watch)?;
    let stop = Arc::new(AtomicBool::new(false));
    {
        let stop = stop.clone();
        ctrlc::set_handler(move || stop.store(true, Ordering::SeqCst)).map_err(|e| CliError::Setup(e.to_string()))?;
    }
    eprintln!("watching {} (Ctrl-C to stop)", dir.display());
    let started = std::time::Instant::now();
    while !stop.load(Ordering::SeqCst) && duration.is_none_or(|d| started.elapsed() < Duration::from_secs(d)) {
        std::thread::sleep(Duration::from_millis(100));
    }
    let log = session.stop();
    eprintln!("{} injected, {} diagnostics", log.injections(), log.diagnostics.len());
    Ok(EXIT_OK)
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let g = &cli.global;
    match cli.command {
        Command::Annotate { path } => cmd_annotate(g, &path),
        Command::Watch { dir, duration_secs } => cmd_watch(g, &dir, duration_secs),
        Command::BuildDataset(a) => experiments::cmd_build_dataset(g, &a),
        Command::Stats(a) => experiments::cmd_stats(g, &a),
        Command::Predict(a) => experiments::cmd_predict(g, &a),
        Command::Eval(a) => experiments::cmd_eval(g, &a),
        Command::Ablate(a) => experiments::cmd_ablate(g, &a),
        Command::ExportFinetune(a) => experiments::cmd_export_finetune(g, &a),
        Command::MockServe { fixture, addr } => experiments::cmd_mock_serve(&fixture, &addr),
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    init_logging(cli.global.verbose);
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("altgen: {e}");
            e.exit_code()
        }
    }
}
