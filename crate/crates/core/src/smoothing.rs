//! Interpolated modified Kneser-Ney estimation.
//!
//! For a gram `(ctx, w)` at order k with adjusted count `c` and context total
//! `c(ctx)`:
//!
//! ```text
//! p_k(w | ctx) = max(0, c - D(c)) / c(ctx) + gamma(ctx) * p_{k-1}(w | ctx')
//! gamma(ctx)   = (d1 N1(ctx) + d2 N2(ctx) + d3+ N3+(ctx)) / c(ctx)
//! ```
//!
//! with the uniform distribution over the predictable vocabulary below the
//! unigrams. A context with no counted extensions passes all of its mass to
//! the next lower order. The result is stored in back-off form: each kept
//! gram holds `log10 p_k` and each context `log10 gamma`.

use std::fmt;

use crate::counts::{count_of_counts, CountOfCounts, CountTable, Gram, GramMap};
use crate::error::{Error, Result};
use crate::model::{NGramModel, ProbEntry};
use crate::vocab::BOS;

/// Discounts for adjusted counts of 1, 2 and 3 or more at one order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discounts {
    pub d1: f64,
    pub d2: f64,
    pub d3plus: f64,
}

impl Discounts {
    pub fn uniform(d: f64) -> Self {
        Discounts { d1: d, d2: d, d3plus: d }
    }

    /// Discount applied to an adjusted count.
    pub fn for_count(&self, count: u64) -> f64 {
        match count {
            0 => 0.0,
            1 => self.d1,
            2 => self.d2,
            _ => self.d3plus,
        }
    }

    fn validate(self) -> std::result::Result<Self, Degenerate> {
        let checks = [("d1", self.d1, 1.0), ("d2", self.d2, 2.0), ("d3+", self.d3plus, 3.0)];
        for (name, value, max) in checks {
            if !(0.0..=max).contains(&value) {
                return Err(Degenerate::OutOfRange { name, value, max });
            }
        }
        Ok(self)
    }
}

/// Why count-of-counts statistics cannot produce discounts.
#[derive(Debug, Clone, PartialEq)]
pub enum Degenerate {
    /// n_k is zero for a k the estimate divides by.
    MissingCount(u8),
    OutOfRange { name: &'static str, value: f64, max: f64 },
}

impl fmt::Display for Degenerate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degenerate::MissingCount(k) => write!(f, "no grams with adjusted count {k}"),
            Degenerate::OutOfRange { name, value, max } => {
                write!(f, "{name} = {value} outside [0, {max}]")
            }
        }
    }
}

/// Chen-Goodman discount estimates from count-of-counts, or the uniform
/// `fallback` discount when the estimate is degenerate.
pub fn estimate_discounts(coc: &CountOfCounts, fallback: Option<f64>) -> std::result::Result<Discounts, Degenerate> {
    let estimated = closed_form(coc).and_then(Discounts::validate);
    match (estimated, fallback) {
        (Ok(d), _) => Ok(d),
        (Err(_), Some(f)) => Ok(Discounts::uniform(f)),
        (Err(e), None) => Err(e),
    }
}

fn closed_form(coc: &CountOfCounts) -> std::result::Result<Discounts, Degenerate> {
    for (k, n) in [(1, coc.n1), (2, coc.n2), (3, coc.n3)] {
        if n == 0 {
            return Err(Degenerate::MissingCount(k));
        }
    }
    let [n1, n2, n3, n4] = [coc.n1, coc.n2, coc.n3, coc.n4].map(|n| n as f64);
    let y = n1 / (n1 + 2.0 * n2);
    Ok(Discounts {
        d1: 1.0 - 2.0 * y * n2 / n1,
        d2: 2.0 - 3.0 * y * n3 / n2,
        d3plus: 3.0 - 4.0 * y * n4 / n3,
    })
}

#[derive(Debug, Default, Clone, Copy)]
struct ContextStats {
    total: u64,
    buckets: [u64; 3],
}

impl ContextStats {
    fn add(&mut self, count: u64) {
        self.total += count;
        self.buckets[(count.min(3) - 1) as usize] += 1;
    }

    /// Interpolation weight; 1 when nothing was counted after this context.
    fn gamma(&self, d: &Discounts) -> f64 {
        if self.total == 0 {
            return 1.0;
        }
        let [b1, b2, b3] = self.buckets.map(|b| b as f64);
        (d.d1 * b1 + d.d2 * b2 + d.d3plus * b3) / self.total as f64
    }
}

/// Estimate a back-off model from adjusted counts.
///
/// `fallback_discount`, when given, replaces degenerate per-order discount
/// estimates and must lie in (0, 1].
pub fn estimate_model(table: &CountTable, fallback_discount: Option<f64>) -> Result<NGramModel> {
    if let Some(f) = fallback_discount {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::InvalidFallback(f));
        }
    }
    let top = table.order();
    let vocab = table.vocab().clone();
    let bos = vocab.get(BOS);

    let discounts = (1..=top)
        .map(|k| {
            let coc = count_of_counts(table, k)?;
            estimate_discounts(&coc, fallback_discount)
                .map_err(|reason| Error::DiscountEstimation { order: k, reason: reason.to_string() })
        })
        .collect::<Result<Vec<_>>>()?;

    // Context statistics, index k-1 holds contexts of length k-1.
    let stats: Vec<GramMap<ContextStats>> = (1..=top)
        .map(|k| {
            let mut m: GramMap<ContextStats> = GramMap::default();
            for (g, &c) in table.counts(k) {
                m.entry(Gram::from_slice(&g[..k - 1])).or_default().add(c);
            }
            m
        })
        .collect();

    // Kept grams per order: counted grams plus the prefixes of every kept
    // gram one order up, so that each context has an entry to carry its
    // back-off weight. Unigrams cover the whole vocabulary. Probabilities
    // are held linear until the final pass.
    let placeholder = ProbEntry { log10_prob: 0.0, log10_backoff: None };
    let mut entries: Vec<GramMap<ProbEntry>> = vec![GramMap::default(); top];
    for k in (2..=top).rev() {
        let mut level: GramMap<ProbEntry> = GramMap::default();
        level.reserve(table.counts(k).len());
        level.extend(table.counts(k).keys().map(|g| (g.clone(), placeholder)));
        if k < top {
            for g in entries[k].keys() {
                level.entry(Gram::from_slice(&g[..k])).or_insert(placeholder);
            }
        }
        entries[k - 1] = level;
    }

    let predictable = vocab.len() - usize::from(bos.is_some());
    let uniform = 1.0 / predictable as f64;
    let root = stats[0].get(&Gram::new()).copied().unwrap_or_default();
    let root_gamma = root.gamma(&discounts[0]);
    for (id, _) in vocab.iter() {
        let key = Gram::from_slice(&[id]);
        let p = if Some(id) == bos {
            // placeholder, replaced below
            1.0
        } else {
            let c = table.counts(1).get(&key).copied().unwrap_or(0);
            let pseudo = if root.total == 0 {
                0.0
            } else {
                (c as f64 - discounts[0].for_count(c)).max(0.0) / root.total as f64
            };
            pseudo + root_gamma * uniform
        };
        entries[0].insert(key, ProbEntry { log10_prob: p, log10_backoff: None });
    }

    for k in 2..=top {
        let d = &discounts[k - 1];
        let (lower, upper) = entries.split_at_mut(k - 1);
        let lower = &lower[k - 2];
        for (g, e) in upper[0].iter_mut() {
            let backed = lower.get(&g[1..]).expect("suffix of a kept gram is kept").log10_prob;
            let c = table.counts(k).get(g).copied().unwrap_or(0);
            e.log10_prob = match stats[k - 1].get(&g[..k - 1]) {
                Some(s) if s.total > 0 => {
                    (c as f64 - d.for_count(c)).max(0.0) / s.total as f64 + s.gamma(d) * backed
                }
                _ => backed,
            };
        }
    }

    for (i, level) in entries.iter_mut().enumerate() {
        let k = i + 1;
        for (g, e) in level.iter_mut() {
            e.log10_prob = if Some(g[0]) == bos && k == 1 { ProbEntry::BOS_LOG10_PROB } else { e.log10_prob.log10() };
            e.log10_backoff = (k < top).then(|| {
                let s = stats[k].get(g).copied().unwrap_or_default();
                s.gamma(&discounts[k]).log10()
            });
        }
    }

    Ok(NGramModel::from_parts(top, vocab, entries))
}
