use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use groundfact_checker::{CheckerSpec, ChunkPlan};
use groundfact_core::Split;

use crate::engine::PolicyChoice;

#[derive(Debug, Parser)]
#[command(name = "groundfact", version, about = "Grounded fact-checking benchmark and synthetic data toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize raw benchmark rows and print per-dataset statistics.
    Ingest(IngestArgs),
    /// Assign validation/test splits by query group, per dataset.
    Split(SplitArgs),
    /// Generate synthetic training tuples.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Tune per-dataset thresholds on the validation split.
    Tune(TuneArgs),
    /// Check claims against documents.
    Check(CheckArgs),
    /// Evaluate a checker on a benchmark split.
    Eval(EvalArgs),
    /// Render evaluation reports as a results table.
    Report(ReportArgs),
    /// Serve the annotation API and UI.
    AnnotateServe(AnnotateArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    /// Dataset id for rows that do not carry one.
    #[arg(long)]
    pub dataset: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Share of records that go to validation.
    #[arg(long, default_value_t = 0.5)]
    pub fraction: f64,
}

#[derive(Debug, Args)]
pub struct CheckerArgs {
    /// `stub`, `remote:URL` or `llm:MODEL`.
    #[arg(long, default_value = "stub")]
    pub checker: CheckerSpec,
    /// `whitespace:N` or `sentence:N`.
    #[arg(long, default_value = "whitespace:500")]
    pub plan: ChunkPlan,
    /// Gateway TOML, needed for LLM checkers, decomposition and decontextualization.
    #[arg(long)]
    pub gateway: Option<PathBuf>,
    #[arg(long, default_value_t = 60)]
    pub timeout_secs: u64,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[arg(long)]
    pub bench: PathBuf,
    #[command(flatten)]
    pub checker: CheckerArgs,
    #[arg(long, default_value_t = 8)]
    pub workers: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub bench: PathBuf,
    #[command(flatten)]
    pub checker: CheckerArgs,
    /// `fixed:T`, `midpoint`, `tuned` or `tuned:DATASET`.
    #[arg(long, default_value = "fixed:0.5")]
    pub policy: PolicyChoice,
    #[arg(long)]
    pub thresholds: Option<PathBuf>,
    #[arg(long, default_value = "test")]
    pub split: Split,
    #[arg(long, default_value_t = 8)]
    pub workers: usize,
    /// Decide each atomic fact separately; supported only if all are.
    #[arg(long)]
    pub decompose: bool,
    /// Rewrite claims that have context before checking.
    #[arg(long)]
    pub decontextualize: bool,
    /// Earlier report to compare against with a paired bootstrap.
    #[arg(long)]
    pub champion: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub bootstrap_runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Evidence document file; repeat for several.
    #[arg(long = "doc", required = true)]
    pub docs: Vec<PathBuf>,
    #[arg(long, required_unless_present = "claims")]
    pub claim: Option<String>,
    /// One claim per line; checked in a single multi-claim LLM call.
    #[arg(long, conflicts_with = "claim")]
    pub claims: Option<PathBuf>,
    #[command(flatten)]
    pub checker: CheckerArgs,
    /// `fixed:T`, `midpoint` or `tuned:DATASET`.
    #[arg(long, default_value = "fixed:0.5")]
    pub policy: PolicyChoice,
    #[arg(long)]
    pub thresholds: Option<PathBuf>,
    #[arg(long)]
    pub decompose: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthCommon {
    #[arg(long)]
    pub gateway: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Seed of the output shuffle.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub workers: usize,
}

#[derive(Debug, Subcommand)]
pub enum SynthCommand {
    /// Documents written around human claims.
    C2d {
        /// JSONL of `{id, claim}`.
        #[arg(long)]
        claims: PathBuf,
        #[arg(long, default_value_t = 3)]
        attempts: u32,
        #[arg(long, default_value_t = 8)]
        atom_cap: usize,
        #[command(flatten)]
        common: SynthCommon,
    },
    /// Claims summarized from real documents.
    D2c {
        /// JSONL of `{id, text}` or `{id, sentences}`.
        #[arg(long)]
        docs: PathBuf,
        #[arg(long, default_value_t = 8)]
        atom_cap: usize,
        #[command(flatten)]
        common: SynthCommon,
    },
    /// Single-prompt claim-to-document baseline.
    C2dSimp {
        #[arg(long)]
        claims: PathBuf,
        #[command(flatten)]
        common: SynthCommon,
    },
    /// Single-prompt document-to-claim baseline.
    D2cSimp {
        #[arg(long)]
        docs: PathBuf,
        #[command(flatten)]
        common: SynthCommon,
    },
}

#[derive(Debug, Args)]
pub struct AnnotateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
}
