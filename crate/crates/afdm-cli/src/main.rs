//! `afdm`: generate synthetic transaction streams, preprocess them, and run
//! the classifiers through k-fold or prequential evaluation. One binary with
//! subcommands because the whole thing is one pipeline:
//! generate -> preprocess -> eval / stream -> score.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Streaming fraud detection toolkit.
#[derive(Parser)]
#[command(name = "afdm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded synthetic transaction CSV.
    Generate(GenerateArgs),
    /// Balance a transaction CSV by undersampling the legal class.
    Preprocess(PreprocessArgs),
    /// Compare classifiers under stratified k-fold cross-validation.
    Eval(EvalArgs),
    /// Prequential (test-then-train) run over a CSV, metrics as JSON lines.
    Stream(StreamArgs),
    /// Score a CSV with a saved model snapshot; no learning.
    Score(ScoreArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Generator config JSON; defaults are used when omitted.
    #[arg(long)]
    config: Option<std::path::PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: std::path::PathBuf,
}

#[derive(Args)]
struct PreprocessArgs {
    /// Input transaction CSV.
    #[arg(long)]
    data: std::path::PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: std::path::PathBuf,
    /// Legal rows kept per fraud row.
    #[arg(long, default_value_t = 3.0)]
    ratio: f64,
    /// Shuffle/subsample seed; falls back to AFDM_SEED, then 42.
    #[arg(long)]
    seed: Option<u64>,
    /// Skip malformed data rows (counted) instead of aborting.
    #[arg(long)]
    skip_bad_rows: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Input transaction CSV.
    #[arg(long)]
    data: std::path::PathBuf,
    /// Comma-separated classifier names from
    /// {afdm, nb, ht, knn, j48tree, logistic}.
    #[arg(long, default_value = "afdm,nb,ht,knn,j48tree,logistic")]
    classifiers: String,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Fold/ensemble seed; falls back to AFDM_SEED, then 42.
    #[arg(long)]
    seed: Option<u64>,
    /// Misclassification weights as "w_fn,w_fp".
    #[arg(long, default_value = "10,1")]
    weights: String,
    /// Balance the dataset at this legal:fraud ratio before evaluating.
    #[arg(long)]
    balance: Option<f64>,
    /// Ensemble size for the afdm configuration.
    #[arg(long, default_value_t = 10)]
    bag_size: usize,
    /// Shuffle each training partition (seeded) instead of streaming it in
    /// dataset order.
    #[arg(long)]
    shuffle_train: bool,
    /// Skip malformed data rows (counted) instead of aborting.
    #[arg(long)]
    skip_bad_rows: bool,
    /// Report JSON path; the text table always goes to stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct StreamArgs {
    /// Input transaction CSV, consumed in file order.
    #[arg(long)]
    data: std::path::PathBuf,
    /// One incremental classifier: afdm, nb, ht, or knn.
    #[arg(long, default_value = "afdm")]
    classifier: String,
    #[arg(long, default_value_t = 1000)]
    report_every: u64,
    /// Misclassification weights as "w_fn,w_fp".
    #[arg(long, default_value = "10,1")]
    weights: String,
    /// Ensemble size for the afdm configuration.
    #[arg(long, default_value_t = 10)]
    bag_size: usize,
    /// Ensemble seed; falls back to AFDM_SEED, then 42.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the final model snapshot here.
    #[arg(long)]
    snapshot_out: Option<std::path::PathBuf>,
    /// Skip malformed data rows (counted) instead of aborting.
    #[arg(long)]
    skip_bad_rows: bool,
}

#[derive(Args)]
struct ScoreArgs {
    /// Model snapshot JSON.
    #[arg(long)]
    snapshot: std::path::PathBuf,
    /// Input transaction CSV.
    #[arg(long)]
    data: std::path::PathBuf,
    /// Fraud verdict threshold: verdict is 1 iff p_fraud > threshold.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Output CSV path (row,p_fraud,verdict).
    #[arg(long)]
    out: std::path::PathBuf,
    /// Skip malformed data rows (counted) instead of aborting.
    #[arg(long)]
    skip_bad_rows: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => commands::generate(args),
        Command::Preprocess(args) => commands::preprocess(args),
        Command::Eval(args) => commands::eval(args),
        Command::Stream(args) => commands::stream(args),
        Command::Score(args) => commands::score(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("afdm: error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
