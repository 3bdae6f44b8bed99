//! Command-line runner for the goa-ids pipeline.
//!
//! Subcommands `prepare`, `select`, `evaluate` and `pipeline` share one set of
//! flags, resolved as defaults, then an optional `--config` file, then the
//! flags themselves. Exit codes: 0 success, 1 usage or configuration error,
//! 2 data error, 3 runtime failure.

pub mod config;
pub mod svg;

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::{evaluate, pipeline, prepare, select, STAGE_PREFIXES};
pub use config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("runtime failure: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "goa-ids",
    version,
    about = "Grasshopper feature selection + linear SVM intrusion detection on NSL-KDD records"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse, subsample, encode and normalize the input file.
    Prepare(RunFlags),
    /// Run the feature-selection swarm on the prepared rows.
    Select(RunFlags),
    /// Cross-validate the full pipeline and write reports and charts.
    Evaluate(RunFlags),
    /// prepare, select and evaluate in sequence.
    Pipeline(RunFlags),
    /// Write synthetic records in NSL-KDD format (for trying the tool without the dataset).
    Synth(SynthFlags),
}

#[derive(Debug, Args, Default)]
struct RunFlags {
    /// Input file in NSL-KDD format (e.g. KDDTrain+.txt).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed; every stage derives its own seed from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Cross-validation folds.
    #[arg(long)]
    folds: Option<usize>,
    /// Stratified subsample size (0 = all rows).
    #[arg(long)]
    subsample: Option<usize>,
    /// Grasshopper population size.
    #[arg(long)]
    pop: Option<usize>,
    /// Maximum optimizer iterations.
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    c_max: Option<f64>,
    #[arg(long)]
    c_min: Option<f64>,
    /// Per-member SWAP mutation probability.
    #[arg(long)]
    swap_prob: Option<f64>,
    /// Per-member Reversion mutation probability.
    #[arg(long)]
    rev_prob: Option<f64>,
    /// SVM regularization constant C.
    #[arg(long)]
    svm_c: Option<f64>,
    /// SVM training epochs for the final classifier.
    #[arg(long)]
    epochs: Option<usize>,
    /// Worker threads (default: all processors).
    #[arg(long)]
    threads: Option<usize>,
    /// Do not write SVG charts.
    #[arg(long)]
    no_plots: bool,
    /// key=value configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthFlags {
    /// Destination file.
    #[arg(long)]
    out: PathBuf,
    /// Number of records.
    #[arg(long, default_value_t = 125_973)]
    rows: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl RunFlags {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            cfg.apply_text(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        }
        if let Some(v) = &self.data {
            cfg.data = Some(v.clone());
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        macro_rules! take {
            ($($field:ident),*) => { $( if let Some(v) = self.$field { cfg.$field = v; } )* };
        }
        take!(
            seed, folds, subsample, pop, iters, c_max, c_min, swap_prob, rev_prob, svm_c, epochs,
            threads
        );
        if self.no_plots {
            cfg.plots = false;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn with_threads<T>(cfg: &RunConfig, f: impl FnOnce() -> T + Send) -> Result<T, CliError>
where
    T: Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot start worker threads: {e}")))?;
    Ok(pool.install(f))
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Synth(flags) => commands::synth(&flags.out, flags.rows, flags.seed),
        Command::Prepare(flags) => {
            let cfg = flags.resolve()?;
            with_threads(&cfg, || prepare(&cfg))?
        }
        Command::Select(flags) => {
            let cfg = flags.resolve()?;
            with_threads(&cfg, || select(&cfg))?
        }
        Command::Evaluate(flags) => {
            let cfg = flags.resolve()?;
            with_threads(&cfg, || evaluate(&cfg))?
        }
        Command::Pipeline(flags) => {
            let cfg = flags.resolve()?;
            with_threads(&cfg, || pipeline(&cfg))?
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// process exit code. Errors are reported on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("goa-ids: {e}");
            e.exit_code()
        }
    }
}
