use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use humorlm_core::{Direction, PrepConfig};

mod commands;
mod corpus;
mod grid;

#[derive(Debug, Parser)]
#[command(name = "humorlm", version, about = "Train n-gram language models and rank hashtag tweets by funniness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a modified Kneser-Ney model and write it as ARPA.
    #[command(alias = "export-arpa")]
    Train(TrainArgs),
    /// Write rankings (<hashtag>_PREDICT_B.tsv).
    Rank(PredictArgs),
    /// Write pairwise predictions (<hashtag>_PREDICT_A.tsv).
    Compare(PredictArgs),
    /// Score prediction files against gold hashtag files.
    Evaluate(EvaluateArgs),
    /// Run a declarative grid of train + rank + evaluate rows.
    Grid(GridArgs),
    /// Load an ARPA file and verify its structure and normalization.
    ImportCheck(ImportCheckArgs),
}

/// Pre-processing switches. Each is tri-state so that unset flags fall back
/// to model metadata or defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct PrepFlags {
    /// Remove tokens starting with '#' or '@'.
    #[arg(long, overrides_with = "no_filter_tags")]
    filter_tags: bool,
    #[arg(long, overrides_with = "filter_tags")]
    no_filter_tags: bool,
    /// Remove URL tokens from tweets (default on).
    #[arg(long, overrides_with = "no_filter_urls")]
    filter_urls: bool,
    #[arg(long, overrides_with = "filter_urls")]
    no_filter_urls: bool,
    /// Pad lines with <s> and </s>.
    #[arg(long, overrides_with = "no_boundaries")]
    boundaries: bool,
    #[arg(long, overrides_with = "boundaries")]
    no_boundaries: bool,
    /// ASCII lowercase all tokens.
    #[arg(long, overrides_with = "no_lowercase")]
    lowercase: bool,
    #[arg(long, overrides_with = "lowercase")]
    no_lowercase: bool,
    /// Split ASCII punctuation into separate tokens.
    #[arg(long, overrides_with = "no_split_punct")]
    split_punct: bool,
    #[arg(long, overrides_with = "split_punct")]
    no_split_punct: bool,
}

fn tri(on: bool, off: bool) -> Option<bool> {
    match (on, off) {
        (true, _) => Some(true),
        (_, true) => Some(false),
        _ => None,
    }
}

impl PrepFlags {
    pub fn boundaries(&self) -> Option<bool> {
        tri(self.boundaries, self.no_boundaries)
    }

    /// `base` with every explicitly given flag applied.
    pub fn resolve(&self, base: PrepConfig) -> PrepConfig {
        PrepConfig {
            filter_tags: tri(self.filter_tags, self.no_filter_tags).unwrap_or(base.filter_tags),
            filter_urls: tri(self.filter_urls, self.no_filter_urls).unwrap_or(base.filter_urls),
            split_punct: tri(self.split_punct, self.no_split_punct).unwrap_or(base.split_punct),
            lowercase: tri(self.lowercase, self.no_lowercase).unwrap_or(base.lowercase),
            boundaries: self.boundaries().unwrap_or(base.boundaries),
        }
    }
}

fn parse_order(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("order must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_fallback(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(f) if f > 0.0 && f <= 1.0 => Ok(f),
        Ok(f) => Err(format!("{f} is outside (0, 1]")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Corpus files or directories. `.tsv` files are hashtag files (tweet
    /// text in the second column); other files hold one sentence per line.
    #[arg(long = "corpus", required = true, num_args = 1..)]
    pub corpus: Vec<PathBuf>,
    /// Where to write the ARPA model.
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long, default_value = "3", value_parser = parse_order)]
    pub order: usize,
    #[command(flatten)]
    pub prep: PrepFlags,
    /// Default ranking direction recorded in the model.
    #[arg(long)]
    pub direction: Option<Direction>,
    /// Uniform discount used where count-of-counts are degenerate.
    #[arg(long, value_parser = parse_fallback)]
    pub fallback_discount: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// ARPA model to score with.
    #[arg(long)]
    pub model: PathBuf,
    /// A hashtag .tsv file or a directory of them.
    #[arg(long)]
    pub hashtags: PathBuf,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    /// Overrides the direction stored in the model.
    #[arg(long)]
    pub direction: Option<Direction>,
    #[command(flatten)]
    pub prep: PrepFlags,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Directory holding <hashtag>_PREDICT_A.tsv and <hashtag>_PREDICT_B.tsv.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Directory of gold hashtag files (label column required).
    #[arg(long)]
    pub gold: PathBuf,
    /// Report path; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// TOML grid description.
    #[arg(long)]
    pub config: PathBuf,
    /// Summary report path; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ImportCheckArgs {
    #[arg(long)]
    pub model: PathBuf,
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("HUMORLM_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow::anyhow!("HUMORLM_THREADS must be a positive integer, got \"{value}\""))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    init_threads()?;
    match cli.command {
        Command::Train(args) => commands::train(&args),
        Command::Rank(args) => commands::predict(&args, commands::Output::Ranking),
        Command::Compare(args) => commands::predict(&args, commands::Output::Pairs),
        Command::Evaluate(args) => commands::evaluate(&args),
        Command::Grid(args) => grid::run(&args),
        Command::ImportCheck(args) => commands::import_check(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
