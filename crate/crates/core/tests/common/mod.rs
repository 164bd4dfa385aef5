#![allow(dead_code)]

pub mod oracle;

use humorlm_core::{count_corpus, estimate_model, NGramModel, PrepConfig, TokenSeq};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub use oracle::Oracle;

/// One generated training setup.
pub struct Case {
    pub lines: Vec<Vec<String>>,
    pub order: usize,
    pub boundaries: bool,
}

impl Case {
    pub fn config(&self) -> PrepConfig {
        PrepConfig {
            filter_tags: false,
            filter_urls: false,
            split_punct: false,
            lowercase: false,
            boundaries: self.boundaries,
        }
    }

    pub fn text(&self) -> Vec<String> {
        self.lines.iter().map(|l| l.join(" ")).collect()
    }

    pub fn model(&self, fallback: Option<f64>) -> humorlm_core::Result<NGramModel> {
        let table = count_corpus(self.text(), self.order, &self.config())?;
        estimate_model(&table, fallback)
    }

    pub fn oracle(&self, fallback: Option<f64>) -> Option<Oracle> {
        Oracle::new(&self.lines, self.order, self.boundaries, fallback)
    }
}

const WORDS: [&str; 7] = ["a", "b", "c", "d", "e", "f", "g"];

/// A corpus of 3..=100 tokens over a small alphabet so that counts repeat.
pub fn random_case(seed: u64) -> Case {
    let mut rng = StdRng::seed_from_u64(seed);
    let total = rng.random_range(3..=100);
    let alphabet = rng.random_range(2..=WORDS.len());
    let mut lines = Vec::new();
    let mut left = total;
    while left > 0 {
        let len = rng.random_range(1..=8).min(left);
        left -= len;
        lines.push((0..len).map(|_| WORDS[rng.random_range(0..alphabet)].to_string()).collect());
    }
    Case { lines, order: rng.random_range(1..=3), boundaries: rng.random_bool(0.5) }
}

/// Random sequences drawn from the corpus alphabet plus an unseen word.
pub fn random_sequences(seed: u64, count: usize) -> Vec<TokenSeq> {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
    (0..count)
        .map(|_| {
            let len = rng.random_range(0..=10);
            (0..len)
                .map(|_| if rng.random_bool(0.1) { "oov" } else { WORDS[rng.random_range(0..WORDS.len())] })
                .collect()
        })
        .collect()
}

/// Every context stored in the model (grams below the top order), plus the
/// empty context.
pub fn contexts(model: &NGramModel) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for k in 1..model.order() {
        out.extend(model.grams(k).into_iter().map(|(g, _)| g.into_iter().map(String::from).collect()));
    }
    out
}

/// Largest |sum_w p(w | ctx) - 1| over all stored contexts.
pub fn max_normalization_error(model: &NGramModel) -> f64 {
    let vocab: Vec<&str> = model.predictable().collect();
    contexts(model)
        .iter()
        .map(|ctx| {
            let mass: f64 = vocab.iter().map(|w| 10f64.powf(model.score_word(ctx, w))).sum();
            (mass - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Largest difference between the engine and the oracle over stored
/// conditional probabilities and the given sequences.
pub fn max_oracle_gap(model: &NGramModel, oracle: &Oracle, seqs: &[TokenSeq], boundaries: bool) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 1..=model.order() {
        for (gram, e) in model.grams(k) {
            if gram == ["<s>"] {
                continue;
            }
            let ctx: Vec<String> = gram[..k - 1].iter().map(|t| t.to_string()).collect();
            let p = oracle.prob(&ctx, gram[k - 1]);
            worst = worst.max((10f64.powf(e.log10_prob) - p).abs());
        }
    }
    for seq in seqs {
        let got = model.score_sequence(seq, boundaries);
        worst = worst.max((got - oracle.score(seq.tokens())).abs());
    }
    worst
}
