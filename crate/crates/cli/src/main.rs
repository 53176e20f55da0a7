use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use spambehave::{Error, FORMAT_VERSION};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "spambehave", about = "Spam classification from behavioral email features")]
struct Cli {
    /// Maximum worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract the 21 features from a corpus into a CSV dataset.
    Extract(ExtractArgs),
    /// Cross-validate one or both classifiers on a feature set.
    Evaluate(EvaluateArgs),
    /// Best-first forward feature selection.
    Select(SelectArgs),
    /// Train a model and save it.
    Train(TrainArgs),
    /// Classify messages with a saved model.
    Classify(ClassifyArgs),
    /// Write a seeded synthetic corpus in the spam/ + ham/ layout.
    Synth(SynthArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum LayoutArg {
    Auto,
    TwoDirs,
    MboxPair,
    Manifest,
    Directory,
    Single,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ClassifierArg {
    Nb,
    Mlp,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Table,
    Json,
}

/// Parsed `--features` value: 1-based feature ids in the order given.
#[derive(Debug, Clone)]
struct FeatureSet(Vec<usize>);

fn feature_spec(s: &str) -> Result<FeatureSet, String> {
    spambehave::experiments::parse_feature_spec(s)
        .map(FeatureSet)
        .map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
struct Input {
    /// Feature CSV produced by `extract`.
    #[arg(long, conflicts_with = "corpus", required_unless_present = "corpus")]
    dataset: Option<PathBuf>,
    /// Message corpus; features are extracted on the fly.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = LayoutArg::Auto)]
    layout: LayoutArg,
}

#[derive(Args, Debug, Clone, Copy)]
struct Hyper {
    /// MLP hidden units (default: ceil((features + classes) / 2)).
    #[arg(long)]
    hidden_units: Option<usize>,
    #[arg(long, default_value_t = 0.3)]
    learning_rate: f64,
    #[arg(long, default_value_t = 0.2)]
    momentum: f64,
    #[arg(long, default_value_t = 500)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-6)]
    variance_floor: f64,
    #[arg(long, default_value_t = 1.0)]
    prior_smoothing: f64,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value_t = LayoutArg::Auto)]
    layout: LayoutArg,
    /// Output CSV (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Features to keep, e.g. `cat2,cat3` or `8,9,10`.
    #[arg(long, value_parser = feature_spec)]
    features: Option<FeatureSet>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t = ClassifierArg::Nb)]
    classifier: ClassifierArg,
    /// Evaluate naive Bayes and the MLP side by side.
    #[arg(long)]
    both: bool,
    #[arg(long, value_parser = feature_spec, conflicts_with = "categories")]
    features: Option<FeatureSet>,
    /// Evaluate all seven category combinations.
    #[arg(long)]
    categories: bool,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    hyper: Hyper,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args, Debug)]
struct SelectArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t = ClassifierArg::Nb)]
    classifier: ClassifierArg,
    /// Candidate features (default: all 21).
    #[arg(long, value_parser = feature_spec)]
    features: Option<FeatureSet>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Expansions without improvement before stopping.
    #[arg(long, default_value_t = 5)]
    stale_limit: usize,
    /// Evaluation budget (default: 10 * candidates^2).
    #[arg(long)]
    max_evaluations: Option<usize>,
    /// Skip the comparison table.
    #[arg(long)]
    no_compare: bool,
    #[command(flatten)]
    hyper: Hyper,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t = ClassifierArg::Nb)]
    classifier: ClassifierArg,
    #[arg(long, value_parser = feature_spec)]
    features: Option<FeatureSet>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    hyper: Hyper,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    model: PathBuf,
    /// Corpus to classify (default: one message on standard input).
    #[arg(long, conflicts_with = "dataset")]
    corpus: Option<PathBuf>,
    /// Feature CSV to classify.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = LayoutArg::Auto)]
    layout: LayoutArg,
    /// Show per-feature log-likelihood terms (naive Bayes models only).
    #[arg(long)]
    explain: bool,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    spam_rate: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Failures that end a run, each with its exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::NonFiniteLoss { .. }
        | Error::EmptyMatrix
        | Error::LengthMismatch { .. }
        | Error::DimensionMismatch { .. } => 3,
        _ => 2,
    }
}

fn version_string() -> String {
    format!(
        "{} (model format version {FORMAT_VERSION}; reads version {FORMAT_VERSION} only)",
        env!("CARGO_PKG_VERSION")
    )
}

fn main() -> ExitCode {
    let matches = match Cli::command().version(version_string()).try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };

    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = commands::run(cli.command, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
