use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use humorlm_core::{
    count_sequences, estimate_model, pairwise, rank, read_pairs, read_ranking, score_hashtag, write_pairs,
    write_ranking, CountTable, Direction, GoldTiers, MetricReport, ModelMeta, NGramModel, PairwiseAccuracy,
    PrepConfig, Predictions, TierInversionDistance,
};

use crate::corpus::{self, Corpus};
use crate::{EvaluateArgs, ImportCheckArgs, PredictArgs, TrainArgs};

pub const PREDICT_A: &str = "_PREDICT_A.tsv";
pub const PREDICT_B: &str = "_PREDICT_B.tsv";

pub struct Trained {
    pub model: NGramModel,
    pub table: CountTable,
}

pub fn train_model(
    paths: &[PathBuf],
    order: usize,
    prep: PrepConfig,
    direction: Option<Direction>,
    fallback: Option<f64>,
) -> Result<Trained> {
    let corpus = Corpus::load(paths)?;
    let seqs = corpus.preprocess(&prep);
    let table = count_sequences(&seqs, order, prep.boundaries).context("counting n-grams")?;
    drop(seqs);
    let model = estimate_model(&table, fallback)
        .context("estimating the model (a --fallback-discount helps on tiny corpora)")?
        .with_meta(ModelMeta { prep: Some(prep), direction });
    Ok(Trained { model, table })
}

pub fn write_model(model: &NGramModel, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    model.write_arpa(BufWriter::new(file)).with_context(|| format!("writing {}", path.display()))
}

pub fn read_model(path: &Path) -> Result<NGramModel> {
    let file = File::open(path).with_context(|| format!("opening model {}", path.display()))?;
    NGramModel::read_arpa(BufReader::new(file)).with_context(|| format!("reading model {}", path.display()))
}

pub fn train(args: &TrainArgs) -> Result<()> {
    let prep = args.prep.resolve(PrepConfig::default());
    let Trained { model, table } = train_model(&args.corpus, args.order, prep, args.direction, args.fallback_discount)?;
    write_model(&model, &args.output)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "tokens\t{}", table.tokens())?;
    writeln!(out, "lines\t{}", table.lines())?;
    writeln!(out, "vocab\t{}", model.vocab().len())?;
    for k in 1..=model.order() {
        writeln!(out, "ngram {k}\t{}", model.len(k))?;
    }
    Ok(())
}

type Writer<'a> = &'a dyn Fn(&mut BufWriter<File>) -> std::io::Result<()>;

pub enum Output {
    Ranking,
    Pairs,
}

/// Resolve pre-processing and direction from flags, then model metadata.
fn settings(args: &PredictArgs, model: &NGramModel) -> Result<(PrepConfig, Direction)> {
    let prep = match model.meta().prep {
        Some(stored) => args.prep.resolve(stored),
        None if args.prep.boundaries().is_some() => args.prep.resolve(PrepConfig::default()),
        None => bail!("model has no training metadata; pass --boundaries or --no-boundaries explicitly"),
    };
    let direction = args
        .direction
        .or(model.meta().direction)
        .ok_or_else(|| anyhow!("model has no stored direction; pass --direction most-like|least-like"))?;
    Ok((prep, direction))
}

/// Rank every hashtag file and write one output file per hashtag.
pub fn predict_with(
    model: &NGramModel,
    prep: &PrepConfig,
    direction: Direction,
    hashtags: &Path,
    output_dir: &Path,
    outputs: &[Output],
) -> Result<()> {
    std::fs::create_dir_all(output_dir).with_context(|| format!("creating {}", output_dir.display()))?;
    for path in corpus::hashtag_files(hashtags)? {
        let set = corpus::read_hashtag(&path)?;
        let ranked = rank(score_hashtag(&set, model, prep), direction);
        for output in outputs {
            let (suffix, write): (&str, Writer) = match output {
                Output::Ranking => (PREDICT_B, &|w| write_ranking(w, &ranked)),
                Output::Pairs => (PREDICT_A, &|w| write_pairs(w, &pairwise(&ranked))),
            };
            let target = output_dir.join(format!("{}{suffix}", set.name));
            let mut w = BufWriter::new(File::create(&target).with_context(|| format!("creating {}", target.display()))?);
            write(&mut w).with_context(|| format!("writing {}", target.display()))?;
        }
    }
    Ok(())
}

pub fn predict(args: &PredictArgs, output: Output) -> Result<()> {
    let model = read_model(&args.model)?;
    let (prep, direction) = settings(args, &model)?;
    predict_with(&model, &prep, direction, &args.hashtags, &args.output_dir, &[output])
}

/// Evaluate `<hashtag>_PREDICT_{A,B}.tsv` files against every gold file.
pub fn evaluate_dirs(predictions: &Path, gold_dir: &Path) -> Result<MetricReport> {
    let mut sets = Vec::new();
    for gold_path in corpus::hashtag_files(gold_dir)? {
        let set = corpus::read_hashtag(&gold_path)?;
        let gold = GoldTiers::from_set(&set)?;
        let a = predictions.join(format!("{}{PREDICT_A}", set.name));
        let b = predictions.join(format!("{}{PREDICT_B}", set.name));
        let open = |p: &Path| {
            File::open(p).map(BufReader::new).with_context(|| format!("{}: missing prediction file {}", set.name, p.display()))
        };
        let pairs = read_pairs(open(&a)?).with_context(|| format!("reading {}", a.display()))?;
        let ranking = read_ranking(open(&b)?).with_context(|| format!("reading {}", b.display()))?;
        sets.push((set.name, Predictions { pairs, ranking }, gold));
    }
    let report = MetricReport::evaluate(
        sets.iter().map(|(name, pred, gold)| (name.as_str(), pred, gold)),
        &PairwiseAccuracy,
        &TierInversionDistance,
    )?;
    Ok(report)
}

pub fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let report = evaluate_dirs(&args.predictions, &args.gold)?;
    match &args.output {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            report.write_tsv(BufWriter::new(file))?;
        }
        None => report.write_tsv(std::io::stdout().lock())?,
    }
    Ok(())
}

pub fn import_check(args: &ImportCheckArgs) -> Result<()> {
    let model = read_model(&args.model)?;
    model.check_closure().map_err(|e| anyhow!("back-off closure violated: {e}"))?;
    let vocab: Vec<&str> = model.predictable().collect();
    let mass: f64 = vocab.iter().map(|w| 10f64.powf(model.score_word::<&str>(&[], w))).sum();
    let mut out = std::io::stdout().lock();
    writeln!(out, "order\t{}", model.order())?;
    writeln!(out, "vocab\t{}", model.vocab().len())?;
    for k in 1..=model.order() {
        writeln!(out, "ngram {k}\t{}", model.len(k))?;
    }
    writeln!(out, "unigram_mass\t{mass:.9}")?;
    match &model.meta().prep {
        Some(p) => writeln!(out, "metadata\t{p:?}")?,
        None => writeln!(out, "metadata\tnone")?,
    }
    if (mass - 1.0).abs() > 1e-6 {
        bail!("unigram distribution sums to {mass}, not 1");
    }
    Ok(())
}
