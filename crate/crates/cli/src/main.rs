//! `fnfpad`: synthetic data generation, feature extraction, separation
//! statistics, classification and figures for flash/non-flash capture pairs.
//!
//! Exit codes: 0 success, 1 usage or format error, 2 partial data failure.

mod commands;
mod error;
mod report;
mod svg;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::Outcome;

#[derive(Debug, Parser)]
#[command(name = "fnfpad", version, about = "Flash/non-flash presentation attack analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic paired dataset and its manifest.
    Synth(SynthArgs),
    /// Extract the canonical feature vector of every manifest pair.
    Extract(ExtractArgs),
    /// Per-feature class separation statistics from a feature CSV.
    Stats(StatsArgs),
    /// Train and/or evaluate the linear classifier.
    Classify(ClassifyArgs),
    /// Render an SVG figure for one image.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Png,
    Pnm,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output directory (images plus manifest.jsonl).
    #[arg(long)]
    pub out: PathBuf,
    /// Pairs per class.
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    /// Comma-separated materials.
    #[arg(long, value_delimiter = ',', default_value = "genuine,print,screen,molded")]
    pub classes: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Png)]
    pub format: FormatArg,
    /// Generator configuration JSON; the built-in model when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory for features.csv and report.json.
    #[arg(long)]
    pub out: PathBuf,
    /// Extraction configuration JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Omit the timestamp so reruns are byte-identical.
    #[arg(long)]
    pub deterministic: bool,
    #[arg(long)]
    pub ocl_block: Option<usize>,
    #[arg(long)]
    pub lcs_block: Option<usize>,
    #[arg(long)]
    pub patch_size: Option<usize>,
    #[arg(long)]
    pub realism_block: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub features: PathBuf,
    /// Output JSON report.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Training feature CSV.
    #[arg(long, required_unless_present = "model")]
    pub train: Option<PathBuf>,
    /// Evaluation feature CSV.
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Load an existing model instead of training.
    #[arg(long, conflicts_with = "train")]
    pub model: Option<PathBuf>,
    /// Output directory for model.txt and metrics.json.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = fnfpad::classify::DEFAULT_RIDGE)]
    pub ridge: f64,
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RenderKind {
    OclMap,
    LcsProfile,
    CorrHeatmap,
    RadialSpectrum,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long, value_enum)]
    pub kind: RenderKind,
    /// Input image.
    #[arg(long)]
    pub input: PathBuf,
    /// Output SVG file.
    #[arg(long)]
    pub out: PathBuf,
    /// Block size for ocl-map (default 16) and lcs-profile (default 32).
    #[arg(long)]
    pub block_size: Option<usize>,
    /// Radial bins for radial-spectrum.
    #[arg(long, default_value_t = 16)]
    pub bins: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Synth(a) => commands::synth(&a),
        Command::Extract(a) => commands::extract(&a),
        Command::Stats(a) => commands::stats(&a),
        Command::Classify(a) => commands::classify(&a),
        Command::Render(a) => commands::render(&a),
    };
    match result {
        Ok(Outcome::Complete) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
