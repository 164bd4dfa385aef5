//! Pairwise accuracy and tier-inversion distance.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use crate::error::{Error, Result};
use crate::ranker::{HashtagSet, Pair};

/// Gold funniness tiers: 2 = winner, 1 = top ten, 0 = other.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldTiers(BTreeMap<String, u8>);

impl GoldTiers {
    pub fn new(labels: impl IntoIterator<Item = (String, u8)>) -> Result<GoldTiers> {
        let mut map = BTreeMap::new();
        for (id, label) in labels {
            if label > 2 {
                return Err(Error::InvalidGold(format!("tweet {id} has label {label}")));
            }
            if map.insert(id.clone(), label).is_some() {
                return Err(Error::InvalidGold(format!("tweet {id} labelled twice")));
            }
        }
        if map.values().filter(|&&l| l == 2).count() > 1 {
            return Err(Error::InvalidGold("more than one winning tweet".into()));
        }
        Ok(GoldTiers(map))
    }

    /// Gold labels of a hashtag file; every tweet must carry one.
    pub fn from_set(set: &HashtagSet) -> Result<GoldTiers> {
        let labels = set
            .tweets
            .iter()
            .map(|t| {
                t.gold
                    .map(|g| (t.id.clone(), g))
                    .ok_or_else(|| Error::InvalidGold(format!("{}: tweet {} has no gold label", set.name, t.id)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(labels).map_err(|e| match e {
            Error::InvalidGold(m) => Error::InvalidGold(format!("{}: {m}", set.name)),
            other => other,
        })
    }

    pub fn label(&self, id: &str) -> Result<u8> {
        self.0.get(id).copied().ok_or_else(|| Error::MissingGold(id.to_owned()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }
}

/// Fraction of predicted pairs, among those with different gold tiers, whose
/// label agrees with the gold order.
pub fn accuracy_a(predictions: &[Pair], gold: &GoldTiers) -> Result<f64> {
    let mut correct = 0usize;
    let mut total = 0usize;
    for p in predictions {
        let (a, b) = (gold.label(&p.id_a)?, gold.label(&p.id_b)?);
        if a == b {
            continue;
        }
        total += 1;
        if (p.label == 1 && a > b) || (p.label == 0 && b > a) {
            correct += 1;
        }
    }
    if total == 0 {
        return Err(Error::UndefinedMetric("no prediction pair has differing gold tiers".into()));
    }
    Ok(correct as f64 / total as f64)
}

/// Tier inversions in a funniest-first ranking, normalized by the maximum
/// possible for its label multiset (the number of differently labelled pairs).
pub fn distance_b<S: AsRef<str>>(ranked_ids: &[S], gold: &GoldTiers) -> Result<f64> {
    if ranked_ids.len() != gold.len() {
        return Err(Error::MissingGold(format!(
            "ranking has {} ids but gold has {}",
            ranked_ids.len(),
            gold.len()
        )));
    }
    let mut seen = HashSet::with_capacity(ranked_ids.len());
    let mut labels = Vec::with_capacity(ranked_ids.len());
    for id in ranked_ids {
        let id = id.as_ref();
        if !seen.insert(id) {
            return Err(Error::MissingGold(format!("tweet id {id} ranked twice")));
        }
        labels.push(gold.label(id)?);
    }
    // Counting sweep: `below[l]` = how many earlier items had label l.
    let mut seen_by_label = [0u64; 3];
    let mut inversions = 0u64;
    for &l in &labels {
        inversions += seen_by_label[..l as usize].iter().sum::<u64>();
        seen_by_label[l as usize] += 1;
    }
    let n = labels.len() as u64;
    let same: u64 = seen_by_label.iter().map(|c| c * c.saturating_sub(1) / 2).sum();
    let max = n * n.saturating_sub(1) / 2 - same;
    if max == 0 {
        return Err(Error::UndefinedMetric("all gold labels are equal".into()));
    }
    Ok(inversions as f64 / max as f64)
}

/// A ranking system's output for one hashtag.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Predictions {
    pub pairs: Vec<Pair>,
    pub ranking: Vec<String>,
}

/// A named evaluation formula, so an alternative definition can replace
/// either default.
pub trait Metric: Send + Sync {
    fn name(&self) -> &str;
    fn evaluate(&self, predictions: &Predictions, gold: &GoldTiers) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PairwiseAccuracy;

impl Metric for PairwiseAccuracy {
    fn name(&self) -> &str {
        "accuracy"
    }

    fn evaluate(&self, predictions: &Predictions, gold: &GoldTiers) -> Result<f64> {
        accuracy_a(&predictions.pairs, gold)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TierInversionDistance;

impl Metric for TierInversionDistance {
    fn name(&self) -> &str {
        "distance"
    }

    fn evaluate(&self, predictions: &Predictions, gold: &GoldTiers) -> Result<f64> {
        distance_b(&predictions.ranking, gold)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub name: String,
    pub accuracy: f64,
    pub distance: f64,
}

/// Per-hashtag metrics plus their macro average.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricReport {
    pub rows: Vec<ReportRow>,
}

impl MetricReport {
    pub const MACRO_ROW: &'static str = "MACRO_AVERAGE";

    /// Evaluate each hashtag with the given pair and ranking metrics. Errors
    /// name the hashtag they came from.
    pub fn evaluate<'a>(
        hashtags: impl IntoIterator<Item = (&'a str, &'a Predictions, &'a GoldTiers)>,
        accuracy: &dyn Metric,
        distance: &dyn Metric,
    ) -> Result<MetricReport> {
        let mut rows = Vec::new();
        for (name, pred, gold) in hashtags {
            let tag = |e: Error| match e {
                Error::MissingGold(m) => Error::MissingGold(format!("{name}: {m}")),
                Error::UndefinedMetric(m) => Error::UndefinedMetric(format!("{name}: {m}")),
                other => other,
            };
            rows.push(ReportRow {
                name: name.to_owned(),
                accuracy: accuracy.evaluate(pred, gold).map_err(tag)?,
                distance: distance.evaluate(pred, gold).map_err(tag)?,
            });
        }
        Ok(MetricReport { rows })
    }

    /// Unweighted mean over hashtags, `None` for an empty report.
    pub fn macro_average(&self) -> Option<(f64, f64)> {
        if self.rows.is_empty() {
            return None;
        }
        let n = self.rows.len() as f64;
        let acc = self.rows.iter().map(|r| r.accuracy).sum::<f64>() / n;
        let dist = self.rows.iter().map(|r| r.distance).sum::<f64>() / n;
        Some((acc, dist))
    }

    /// `hashtag<TAB>accuracy<TAB>distance` rows followed by the macro average.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "hashtag\taccuracy\tdistance")?;
        for r in &self.rows {
            writeln!(out, "{}\t{:.6}\t{:.6}", r.name, r.accuracy, r.distance)?;
        }
        if let Some((acc, dist)) = self.macro_average() {
            writeln!(out, "{}\t{acc:.6}\t{dist:.6}", Self::MACRO_ROW)?;
        }
        out.flush()
    }
}
