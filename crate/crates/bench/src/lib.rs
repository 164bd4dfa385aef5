//! Synthetic corpora for benchmarks.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Lines of Zipf-ish text over a `vocab`-word alphabet, 5 to 25 tokens each.
pub fn zipf_lines(lines: usize, vocab: usize, seed: u64) -> Vec<String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let weights: Vec<f64> = (1..=vocab).map(|r| 1.0 / r as f64).collect();
    let total: f64 = weights.iter().sum();
    let cumulative: Vec<f64> = weights
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w / total;
            Some(*acc)
        })
        .collect();
    (0..lines)
        .map(|_| {
            let len = rng.random_range(5..=25);
            (0..len)
                .map(|_| {
                    let u: f64 = rng.random();
                    let rank = cumulative.partition_point(|&c| c < u).min(vocab - 1);
                    format!("w{rank}")
                })
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}
