//! Declarative experiment grid: each row trains a model, ranks every
//! evaluation hashtag and reports macro-averaged metrics.
//!
//! ```toml
//! eval_dir = "trial_dir"      # gold hashtag files
//! output_dir = "grid_out"     # optional, defaults to "grid_out"
//!
//! [[row]]
//! name = "tweets-trigram"
//! corpus = ["train_dir"]
//! order = 3
//! direction = "most-like"
//! filter_tags = false
//! ```
//!
//! Relative paths resolve against the config file's directory.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use humorlm_core::{Direction, PrepConfig};
use rayon::prelude::*;
use serde::Deserialize;

use crate::commands::{self, Output};
use crate::GridArgs;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridConfig {
    eval_dir: PathBuf,
    #[serde(default = "default_output_dir")]
    output_dir: PathBuf,
    #[serde(rename = "row")]
    rows: Vec<Row>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("grid_out")
}

fn default_order() -> usize {
    3
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Row {
    name: String,
    corpus: Vec<PathBuf>,
    #[serde(default = "default_order")]
    order: usize,
    direction: Direction,
    #[serde(default)]
    filter_tags: bool,
    filter_urls: Option<bool>,
    #[serde(default)]
    boundaries: bool,
    #[serde(default)]
    lowercase: bool,
    #[serde(default)]
    split_punct: bool,
    fallback_discount: Option<f64>,
}

impl Row {
    fn prep(&self) -> PrepConfig {
        PrepConfig {
            filter_tags: self.filter_tags,
            filter_urls: self.filter_urls.unwrap_or(PrepConfig::default().filter_urls),
            split_punct: self.split_punct,
            lowercase: self.lowercase,
            boundaries: self.boundaries,
        }
    }
}

fn load(path: &Path) -> Result<GridConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut config: GridConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    config.eval_dir = base.join(&config.eval_dir);
    config.output_dir = base.join(&config.output_dir);
    for row in &mut config.rows {
        row.corpus = row.corpus.iter().map(|p| base.join(p)).collect();
    }
    if config.rows.is_empty() {
        bail!("{}: grid has no [[row]] entries", path.display());
    }
    for (i, row) in config.rows.iter().enumerate() {
        if row.order == 0 {
            bail!("row {} ({}): order must be at least 1", i + 1, row.name);
        }
        if row.corpus.is_empty() {
            bail!("row {} ({}): no corpus paths", i + 1, row.name);
        }
        if config.rows[..i].iter().any(|r| r.name == row.name) {
            bail!("row {} reuses the name \"{}\"", i + 1, row.name);
        }
    }
    Ok(config)
}

fn run_row(config: &GridConfig, row: &Row) -> Result<(f64, f64)> {
    let dir = config.output_dir.join(&row.name);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let prep = row.prep();
    let trained = commands::train_model(&row.corpus, row.order, prep, Some(row.direction), row.fallback_discount)?;
    commands::write_model(&trained.model, &dir.join("model.arpa"))?;
    commands::predict_with(&trained.model, &prep, row.direction, &config.eval_dir, &dir, &[Output::Pairs, Output::Ranking])?;
    let report = commands::evaluate_dirs(&dir, &config.eval_dir)?;
    report.write_tsv(BufWriter::new(File::create(dir.join("report.tsv"))?))?;
    report.macro_average().context("no hashtags evaluated")
}

pub fn run(args: &GridArgs) -> Result<()> {
    let config = load(&args.config)?;
    let results: Vec<Result<(f64, f64)>> = config
        .rows
        .par_iter()
        .map(|row| run_row(&config, row).with_context(|| format!("grid row \"{}\"", row.name)))
        .collect();

    let mut summary = String::from("row\tdataset\torder\tfilter_tags\tboundaries\tlowercase\tsplit_punct\taccuracy\tdistance\n");
    for (row, result) in config.rows.iter().zip(results) {
        let (acc, dist) = result?;
        let dataset: Vec<String> = row.corpus.iter().map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned()).collect();
        summary.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{acc:.6}\t{dist:.6}\n",
            row.name,
            dataset.join(","),
            row.order,
            row.filter_tags,
            row.boundaries,
            row.lowercase,
            row.split_punct
        ));
    }
    match &args.output {
        Some(path) => std::fs::write(path, summary).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(summary.as_bytes())?,
    }
    Ok(())
}
