//! Exact n-gram counting with Kneser-Ney continuation counts.
//!
//! Raw window counts are collected for every order, possibly across several
//! shards, and merged. [`CountTable`] then keeps raw counts at the top order
//! and, below it, the number of distinct left extensions of each gram. Grams
//! starting with `<s>` cannot be extended to the left and keep raw counts.

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::textprep::{PrepConfig, TokenSeq};
use crate::vocab::{Vocab, BOS, EOS};

/// Token-id sequence used as a hash key. Orders up to 4 stay inline.
pub type Gram = SmallVec<[u32; 4]>;

pub type GramMap<V> = FxHashMap<Gram, V>;

/// Raw window counts for orders `1..=order` over an interned vocabulary.
#[derive(Debug, Clone)]
struct RawCounts {
    order: usize,
    boundaries: bool,
    vocab: Vocab,
    windows: Vec<GramMap<u64>>,
    tokens: u64,
    lines: u64,
}

impl RawCounts {
    fn new(order: usize, boundaries: bool) -> Self {
        let mut vocab = Vocab::new();
        if boundaries {
            vocab.intern(BOS);
            vocab.intern(EOS);
        }
        RawCounts {
            order,
            boundaries,
            vocab,
            windows: vec![GramMap::default(); order],
            tokens: 0,
            lines: 0,
        }
    }

    fn add(&mut self, seq: &TokenSeq) {
        if seq.is_empty() {
            return;
        }
        self.lines += 1;
        self.tokens += seq.len() as u64;
        let mut ids = Vec::with_capacity(seq.len() + 2);
        if self.boundaries {
            ids.push(self.vocab.intern(BOS));
        }
        ids.extend(seq.tokens().iter().map(|t| self.vocab.intern(t)));
        if self.boundaries {
            ids.push(self.vocab.intern(EOS));
        }
        let bos = self.boundaries.then(|| self.vocab.intern(BOS));
        for (k, map) in self.windows.iter_mut().enumerate() {
            for w in ids.windows(k + 1) {
                if k == 0 && Some(w[0]) == bos {
                    continue;
                }
                *map.entry(Gram::from_slice(w)).or_insert(0) += 1;
            }
        }
    }

    fn merge(self, other: RawCounts) -> RawCounts {
        // the larger shard keeps its ids; the smaller one is re-interned
        let (mut this, other) =
            if self.vocab.len() >= other.vocab.len() { (self, other) } else { (other, self) };
        let remap: Vec<u32> = other.vocab.iter().map(|(_, t)| this.vocab.intern(t)).collect();
        for (mine, theirs) in this.windows.iter_mut().zip(other.windows) {
            for (gram, n) in theirs {
                let key: Gram = gram.iter().map(|&id| remap[id as usize]).collect();
                *mine.entry(key).or_insert(0) += n;
            }
        }
        this.tokens += other.tokens;
        this.lines += other.lines;
        this
    }
}

/// Per-order Kneser-Ney adjusted counts over a canonical vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    order: usize,
    boundaries: bool,
    vocab: Vocab,
    counts: Vec<GramMap<u64>>,
    total_unigram_mass: u64,
    tokens: u64,
    lines: u64,
}

impl CountTable {
    fn from_raw(raw: RawCounts) -> Result<CountTable> {
        if raw.lines == 0 {
            return Err(Error::EmptyCorpus);
        }
        let (vocab, remap) = raw.vocab.canonicalize();
        let windows: Vec<GramMap<u64>> = raw
            .windows
            .into_iter()
            .map(|map| {
                map.into_iter()
                    .map(|(g, n)| (g.iter().map(|&id| remap[id as usize]).collect::<Gram>(), n))
                    .collect()
            })
            .collect();
        let bos = vocab.get(BOS);
        let top = raw.order;
        let mut counts = Vec::with_capacity(top);
        for k in 1..top {
            let mut adjusted = GramMap::default();
            for gram in windows[k].keys() {
                *adjusted.entry(Gram::from_slice(&gram[1..])).or_insert(0) += 1;
            }
            if bos.is_some() {
                for (gram, &n) in &windows[k - 1] {
                    if Some(gram[0]) == bos {
                        adjusted.insert(gram.clone(), n);
                    }
                }
            }
            counts.push(adjusted);
        }
        counts.push(windows.into_iter().next_back().expect("order >= 1"));
        let total_unigram_mass = counts[0].values().sum();
        Ok(CountTable {
            order: top,
            boundaries: raw.boundaries,
            vocab,
            counts,
            total_unigram_mass,
            tokens: raw.tokens,
            lines: raw.lines,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn boundaries(&self) -> bool {
        self.boundaries
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    /// Adjusted counts at order `k` (1-based). Panics when `k` is out of range.
    pub fn counts(&self, k: usize) -> &GramMap<u64> {
        &self.counts[k - 1]
    }

    /// Adjusted count of a gram given as token strings; 0 if not stored.
    pub fn count(&self, tokens: &[&str]) -> u64 {
        let Some(map) = tokens.len().checked_sub(1).and_then(|i| self.counts.get(i)) else {
            return 0;
        };
        let ids: Option<Gram> = tokens.iter().map(|t| self.vocab.get(t)).collect();
        ids.and_then(|g| map.get(&g).copied()).unwrap_or(0)
    }

    /// Stored grams at order `k` as strings, sorted, with their counts.
    pub fn grams(&self, k: usize) -> Vec<(String, u64)> {
        let mut out: Vec<(String, u64)> = self
            .counts(k)
            .iter()
            .map(|(g, &n)| (self.render(g), n))
            .collect();
        out.sort();
        out
    }

    pub(crate) fn render(&self, gram: &[u32]) -> String {
        gram.iter().map(|&id| self.vocab.token(id)).collect::<Vec<_>>().join(" ")
    }

    pub fn total_unigram_mass(&self) -> u64 {
        self.total_unigram_mass
    }

    /// Number of corpus tokens counted, excluding boundary markers.
    pub fn tokens(&self) -> u64 {
        self.tokens
    }

    /// Number of non-empty lines counted.
    pub fn lines(&self) -> u64 {
        self.lines
    }
}

/// Number of grams at one order whose adjusted count is exactly 1, 2, 3, 4.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CountOfCounts {
    pub n1: u64,
    pub n2: u64,
    pub n3: u64,
    pub n4: u64,
}

/// Tally the grams of order `k` by adjusted count.
pub fn count_of_counts(table: &CountTable, k: usize) -> Result<CountOfCounts> {
    if k == 0 || k > table.order {
        return Err(Error::InvalidOrder(k));
    }
    let mut coc = CountOfCounts::default();
    for &n in table.counts(k).values() {
        match n {
            1 => coc.n1 += 1,
            2 => coc.n2 += 1,
            3 => coc.n3 += 1,
            4 => coc.n4 += 1,
            _ => {}
        }
    }
    Ok(coc)
}

/// Count a corpus sequentially. Lines that are empty after pre-processing
/// are skipped.
pub fn count_corpus<I, S>(lines: I, order: usize, config: &PrepConfig) -> Result<CountTable>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    if order == 0 {
        return Err(Error::InvalidOrder(order));
    }
    let mut raw = RawCounts::new(order, config.boundaries);
    for line in lines {
        raw.add(&config.apply(line.as_ref()));
    }
    CountTable::from_raw(raw)
}

/// Count a corpus on the rayon pool. The result is identical to
/// [`count_corpus`] over the same lines in any order.
pub fn count_corpus_parallel<S>(lines: &[S], order: usize, config: &PrepConfig) -> Result<CountTable>
where
    S: AsRef<str> + Sync,
{
    if order == 0 {
        return Err(Error::InvalidOrder(order));
    }
    let raw = lines
        .par_iter()
        .fold(
            || RawCounts::new(order, config.boundaries),
            |mut acc, line| {
                acc.add(&config.apply(line.as_ref()));
                acc
            },
        )
        .reduce(|| RawCounts::new(order, config.boundaries), RawCounts::merge);
    CountTable::from_raw(raw)
}

/// Count already pre-processed sequences on the rayon pool, for corpora whose
/// parts need different pre-processing.
pub fn count_sequences(seqs: &[TokenSeq], order: usize, boundaries: bool) -> Result<CountTable> {
    if order == 0 {
        return Err(Error::InvalidOrder(order));
    }
    let raw = seqs
        .par_iter()
        .fold(
            || RawCounts::new(order, boundaries),
            |mut acc, seq| {
                acc.add(seq);
                acc
            },
        )
        .reduce(|| RawCounts::new(order, boundaries), RawCounts::merge);
    CountTable::from_raw(raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(boundaries: bool) -> PrepConfig {
        PrepConfig { filter_urls: false, boundaries, ..PrepConfig::default() }
    }

    fn grams(t: &CountTable, k: usize) -> Vec<(String, u64)> {
        t.grams(k)
    }

    fn pairs(items: &[(&str, u64)]) -> Vec<(String, u64)> {
        let mut v: Vec<_> = items.iter().map(|(s, n)| (s.to_string(), *n)).collect();
        v.sort();
        v
    }

    #[test]
    fn repeated_bigram_corpus() {
        let t = count_corpus(["a b a b"], 2, &plain(false)).unwrap();
        assert_eq!(grams(&t, 2), pairs(&[("a b", 2), ("b a", 1)]));
        assert_eq!(grams(&t, 1), pairs(&[("a", 1), ("b", 1)]));
        assert_eq!(t.total_unigram_mass(), 2);
        assert_eq!(t.tokens(), 4);
    }

    #[test]
    fn single_token_unigram() {
        let t = count_corpus(["a"], 1, &plain(false)).unwrap();
        assert_eq!(grams(&t, 1), pairs(&[("a", 1)]));
    }

    #[test]
    fn boundary_counts() {
        let t = count_corpus(["a b", "a c"], 2, &plain(true)).unwrap();
        assert_eq!(
            grams(&t, 2),
            pairs(&[("<s> a", 2), ("a b", 1), ("a c", 1), ("b </s>", 1), ("c </s>", 1)])
        );
        assert_eq!(grams(&t, 1), pairs(&[("</s>", 2), ("a", 1), ("b", 1), ("c", 1)]));
        assert!(t.vocab().contains(BOS) && t.vocab().contains(crate::UNK));
        assert_eq!(t.count(&["<s>", "a"]), 2);
        assert_eq!(t.count(&["zzz"]), 0);
    }

    #[test]
    fn bos_grams_keep_raw_counts_below_top_order() {
        let t = count_corpus(["a b", "a c", "a b"], 3, &plain(true)).unwrap();
        assert_eq!(t.count(&["<s>", "a"]), 3);
        // "a b" is preceded only by <s>
        assert_eq!(t.count(&["a", "b"]), 1);
        assert_eq!(t.count(&["<s>", "a", "b"]), 2);
    }

    #[test]
    fn empty_and_invalid() {
        assert!(matches!(count_corpus(Vec::<&str>::new(), 2, &plain(false)), Err(Error::EmptyCorpus)));
        let tags = PrepConfig { filter_tags: true, ..plain(false) };
        assert!(matches!(count_corpus(["#x @y", ""], 2, &tags), Err(Error::EmptyCorpus)));
        assert!(matches!(count_corpus(["a"], 0, &plain(false)), Err(Error::InvalidOrder(0))));
    }

    #[test]
    fn count_of_count_tallies() {
        let t = count_corpus(["a b a b"], 2, &plain(false)).unwrap();
        assert_eq!(count_of_counts(&t, 2).unwrap(), CountOfCounts { n1: 1, n2: 1, n3: 0, n4: 0 });
        let u = count_corpus(["a b c c c"], 1, &plain(false)).unwrap();
        assert_eq!(count_of_counts(&u, 1).unwrap(), CountOfCounts { n1: 2, n2: 0, n3: 1, n4: 0 });
        // a single-token line has no left extensions below the top order
        let v = count_corpus(["a"], 2, &plain(false)).unwrap();
        assert_eq!(count_of_counts(&v, 1).unwrap(), CountOfCounts::default());
        assert!(matches!(count_of_counts(&t, 3), Err(Error::InvalidOrder(3))));
        assert!(matches!(count_of_counts(&t, 0), Err(Error::InvalidOrder(0))));
    }

    #[test]
    fn parallel_matches_sequential() {
        let lines: Vec<String> = (0..500)
            .map(|i| format!("w{} w{} w{} w{}", i % 7, i % 5, (i * 3) % 11, i % 2))
            .collect();
        for boundaries in [false, true] {
            let seq = count_corpus(&lines, 3, &plain(boundaries)).unwrap();
            let par = count_corpus_parallel(&lines, 3, &plain(boundaries)).unwrap();
            assert_eq!(seq, par);
            let mut rev = lines.clone();
            rev.reverse();
            assert_eq!(seq, count_corpus(&rev, 3, &plain(boundaries)).unwrap());
            let seqs: Vec<TokenSeq> = lines.iter().map(|l| plain(boundaries).apply(l)).collect();
            assert_eq!(seq, count_sequences(&seqs, 3, boundaries).unwrap());
        }
    }
}
