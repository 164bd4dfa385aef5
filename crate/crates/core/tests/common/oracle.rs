//! Brute-force interpolated modified Kneser-Ney, computed straight from the
//! formulas over string n-grams. Shares no code with the engine beyond the
//! boundary marker spellings.

use std::collections::{BTreeMap, BTreeSet};

const BOS: &str = "<s>";
const EOS: &str = "</s>";
const UNK: &str = "<unk>";

type Gram = Vec<String>;

pub struct Oracle {
    order: usize,
    boundaries: bool,
    /// adjusted counts per order, index k-1, only grams with count >= 1
    counts: Vec<BTreeMap<Gram, u64>>,
    /// every known token, including specials
    known: BTreeSet<String>,
    /// predictable tokens: vocabulary without `<s>`
    predictable: Vec<String>,
    /// (d1, d2, d3+) per order
    discounts: Vec<[f64; 3]>,
}

fn windows(line: &[String], boundaries: bool, k: usize) -> Vec<Gram> {
    let mut padded: Vec<String> = Vec::new();
    if boundaries {
        padded.push(BOS.into());
    }
    padded.extend(line.iter().cloned());
    if boundaries {
        padded.push(EOS.into());
    }
    let mut out = Vec::new();
    if padded.len() >= k {
        for i in 0..=padded.len() - k {
            let w = padded[i..i + k].to_vec();
            if k == 1 && w[0] == BOS {
                continue;
            }
            out.push(w);
        }
    }
    out
}

impl Oracle {
    /// `None` when discounts are degenerate and no fallback is given.
    pub fn new(lines: &[Vec<String>], order: usize, boundaries: bool, fallback: Option<f64>) -> Option<Oracle> {
        let lines: Vec<&Vec<String>> = lines.iter().filter(|l| !l.is_empty()).collect();
        let mut raw: Vec<BTreeMap<Gram, u64>> = vec![BTreeMap::new(); order];
        for line in &lines {
            for k in 1..=order {
                for w in windows(line, boundaries, k) {
                    *raw[k - 1].entry(w).or_default() += 1;
                }
            }
        }

        let mut counts = Vec::new();
        for k in 1..=order {
            let mut adj = BTreeMap::new();
            for (g, &n) in &raw[k - 1] {
                let c = if k == order || g[0] == BOS {
                    n
                } else {
                    raw[k].keys().filter(|h| h[1..] == g[..]).count() as u64
                };
                if c > 0 {
                    adj.insert(g.clone(), c);
                }
            }
            counts.push(adj);
        }

        let mut discounts = Vec::new();
        for adj in &counts {
            let n = |i: u64| adj.values().filter(|&&c| c == i).count() as f64;
            let (n1, n2, n3, n4) = (n(1), n(2), n(3), n(4));
            let estimated = if n1 > 0.0 && n2 > 0.0 && n3 > 0.0 {
                let y = n1 / (n1 + 2.0 * n2);
                let d = [1.0 - 2.0 * y * n2 / n1, 2.0 - 3.0 * y * n3 / n2, 3.0 - 4.0 * y * n4 / n3];
                let ok = (0.0..=1.0).contains(&d[0]) && (0.0..=2.0).contains(&d[1]) && (0.0..=3.0).contains(&d[2]);
                ok.then_some(d)
            } else {
                None
            };
            discounts.push(estimated.or(fallback.map(|f| [f, f, f]))?);
        }

        let mut known: BTreeSet<String> = lines.iter().flat_map(|l| l.iter().cloned()).collect();
        known.insert(UNK.into());
        if boundaries {
            known.insert(BOS.into());
            known.insert(EOS.into());
        }
        let predictable = known.iter().filter(|t| *t != BOS).cloned().collect();
        Some(Oracle { order, boundaries, counts, known, predictable, discounts })
    }

    pub fn predictable(&self) -> &[String] {
        &self.predictable
    }

    fn map(&self, t: &str) -> String {
        if self.known.contains(t) { t.to_string() } else { UNK.to_string() }
    }

    fn discount(&self, k: usize, c: u64) -> f64 {
        match c {
            0 => 0.0,
            1 => self.discounts[k - 1][0],
            2 => self.discounts[k - 1][1],
            _ => self.discounts[k - 1][2],
        }
    }

    /// Interpolated p(w | ctx) with `ctx` of length <= order - 1.
    pub fn prob(&self, ctx: &[String], w: &str) -> f64 {
        let ctx: Vec<String> = ctx.iter().map(|t| self.map(t)).collect();
        let w = self.map(w);
        self.prob_mapped(&ctx, &w)
    }

    fn prob_mapped(&self, ctx: &[String], w: &str) -> f64 {
        let k = ctx.len() + 1;
        assert!(k <= self.order);
        let ext: Vec<(&Gram, u64)> = self.counts[k - 1]
            .iter()
            .filter(|(g, _)| g[..k - 1] == *ctx && !(k == 1 && g[0] == BOS))
            .map(|(g, &c)| (g, c))
            .collect();
        let total: u64 = ext.iter().map(|(_, c)| c).sum();
        let lower = if k == 1 {
            1.0 / self.predictable.len() as f64
        } else {
            self.prob_mapped(&ctx[1..], w)
        };
        if total == 0 {
            return lower;
        }
        let bucket = |lo: u64, hi: u64| ext.iter().filter(|(_, c)| *c >= lo && *c <= hi).count() as f64;
        let d = &self.discounts[k - 1];
        let gamma = (d[0] * bucket(1, 1) + d[1] * bucket(2, 2) + d[2] * bucket(3, u64::MAX)) / total as f64;
        let c = ext.iter().find(|(g, _)| g[k - 1] == w).map_or(0, |(_, c)| *c);
        let pseudo = (c as f64 - self.discount(k, c)).max(0.0) / total as f64;
        pseudo + gamma * lower
    }

    /// log10 probability of a token sequence.
    pub fn score(&self, seq: &[String]) -> f64 {
        let mut padded: Vec<String> = Vec::new();
        if self.boundaries {
            padded.push(BOS.into());
        }
        padded.extend(seq.iter().map(|t| self.map(t)));
        if self.boundaries {
            padded.push(EOS.into());
        }
        let first = usize::from(self.boundaries);
        (first..padded.len())
            .map(|i| {
                let start = i.saturating_sub(self.order - 1);
                self.prob_mapped(&padded[start..i], &padded[i]).log10()
            })
            .sum()
    }
}
