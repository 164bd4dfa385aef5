//! Back-off n-gram model: lookup, sequence scoring and ARPA serialization.

use std::io::{BufRead, Write};

use crate::counts::{Gram, GramMap};
use crate::error::{Error, Result};
use crate::ranker::Direction;
use crate::textprep::{PrepConfig, TokenSeq};
use crate::vocab::{Vocab, BOS, EOS};

/// Stored log10 probability and, below the top order, log10 back-off weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbEntry {
    pub log10_prob: f64,
    pub log10_backoff: Option<f64>,
}

impl ProbEntry {
    /// `<s>` is never predicted; its unigram carries this placeholder.
    pub const BOS_LOG10_PROB: f64 = -99.0;
}

/// Training settings carried in ARPA header comments.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelMeta {
    pub prep: Option<PrepConfig>,
    pub direction: Option<Direction>,
}

const META_PREFIX: &str = "# humorlm-meta ";

/// An immutable back-off language model over interned token ids.
#[derive(Debug, Clone)]
pub struct NGramModel {
    order: usize,
    vocab: Vocab,
    entries: Vec<GramMap<ProbEntry>>,
    meta: ModelMeta,
}

impl NGramModel {
    pub(crate) fn from_parts(order: usize, vocab: Vocab, entries: Vec<GramMap<ProbEntry>>) -> Self {
        debug_assert_eq!(entries.len(), order);
        NGramModel { order, vocab, entries, meta: ModelMeta::default() }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn meta(&self) -> &ModelMeta {
        &self.meta
    }

    pub fn with_meta(mut self, meta: ModelMeta) -> Self {
        self.meta = meta;
        self
    }

    /// Number of stored grams at order `k`.
    pub fn len(&self, k: usize) -> usize {
        self.entries.get(k.wrapping_sub(1)).map_or(0, |m| m.len())
    }

    /// Stored entry for a gram given as token strings.
    pub fn entry<S: AsRef<str>>(&self, gram: &[S]) -> Option<ProbEntry> {
        let map = self.entries.get(gram.len().checked_sub(1)?)?;
        let ids: Gram = gram.iter().map(|t| self.vocab.get(t.as_ref())).collect::<Option<_>>()?;
        map.get(&ids).copied()
    }

    /// All stored grams at order `k` as token strings, in canonical id order.
    pub fn grams(&self, k: usize) -> Vec<(Vec<&str>, ProbEntry)> {
        let Some(map) = self.entries.get(k.wrapping_sub(1)) else {
            return Vec::new();
        };
        let mut keyed: Vec<(&Gram, &ProbEntry)> = map.iter().collect();
        keyed.sort_unstable_by(|a, b| a.0.cmp(b.0));
        keyed
            .into_iter()
            .map(|(g, e)| (g.iter().map(|&id| self.vocab.token(id)).collect(), *e))
            .collect()
    }

    /// Tokens that can be predicted: the vocabulary without `<s>`.
    pub fn predictable(&self) -> impl Iterator<Item = &str> {
        self.vocab.iter().map(|(_, t)| t).filter(|t| *t != BOS)
    }

    /// Back-off log10 probability of `word` given `context` ids. Only the
    /// last `order - 1` context ids are used.
    pub fn score_ids(&self, context: &[u32], word: u32) -> f64 {
        let keep = context.len().min(self.order - 1);
        let context = &context[context.len() - keep..];
        let mut backoff = 0.0;
        let mut key = Gram::with_capacity(keep + 1);
        for start in 0..=context.len() {
            let ctx = &context[start..];
            key.clear();
            key.extend_from_slice(ctx);
            key.push(word);
            if let Some(e) = self.entries[ctx.len()].get(&key) {
                return backoff + e.log10_prob;
            }
            if !ctx.is_empty() {
                if let Some(w) = self.entries[ctx.len() - 1].get(ctx).and_then(|e| e.log10_backoff) {
                    backoff += w;
                }
            }
        }
        // Unreachable for models whose vocabulary has a unigram for every
        // token; a foreign file missing one scores the word as impossible.
        f64::NEG_INFINITY
    }

    /// log10 p(word | context), mapping unknown tokens to `<unk>`.
    pub fn score_word<S: AsRef<str>>(&self, context: &[S], word: &str) -> f64 {
        let ctx: Vec<u32> = context.iter().map(|t| self.vocab.id_or_unk(t.as_ref())).collect();
        self.score_ids(&ctx, self.vocab.id_or_unk(word))
    }

    /// Sum of per-token log10 probabilities. With `boundaries`, the sequence
    /// starts in the `<s>` context and the closing `</s>` is scored.
    pub fn score_sequence(&self, seq: &TokenSeq, boundaries: bool) -> f64 {
        let mut ids: Vec<u32> = Vec::with_capacity(seq.len() + 2);
        if boundaries {
            ids.push(self.vocab.id_or_unk(BOS));
        }
        ids.extend(seq.tokens().iter().map(|t| self.vocab.id_or_unk(t)));
        if boundaries {
            ids.push(self.vocab.id_or_unk(EOS));
        }
        let first = usize::from(boundaries);
        (first..ids.len()).map(|i| self.score_ids(&ids[..i], ids[i])).sum()
    }

    /// Checks that every stored gram above order 1 has its prefix and suffix
    /// stored, and that top-order entries carry no back-off weight.
    pub fn check_closure(&self) -> std::result::Result<(), String> {
        for k in 2..=self.order {
            for g in self.entries[k - 1].keys() {
                for part in [&g[..k - 1], &g[1..]] {
                    if !self.entries[k - 2].contains_key(part) {
                        return Err(format!(
                            "{}-gram \"{}\" is missing its {}-gram \"{}\"",
                            k,
                            self.render(g),
                            k - 1,
                            self.render(part)
                        ));
                    }
                }
            }
        }
        if let Some(g) = self.entries[self.order - 1].iter().find(|(_, e)| e.log10_backoff.is_some()) {
            return Err(format!("top-order gram \"{}\" has a back-off weight", self.render(g.0)));
        }
        Ok(())
    }

    fn render(&self, gram: &[u32]) -> String {
        gram.iter().map(|&id| self.vocab.token(id)).collect::<Vec<_>>().join(" ")
    }

    /// Write the model in ARPA format. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn write_arpa<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{META_PREFIX}order={}", self.order)?;
        if let Some(p) = &self.meta.prep {
            writeln!(
                out,
                "{META_PREFIX}filter_tags={} filter_urls={} split_punct={} lowercase={} boundaries={}",
                p.filter_tags, p.filter_urls, p.split_punct, p.lowercase, p.boundaries
            )?;
        }
        if let Some(d) = self.meta.direction {
            writeln!(out, "{META_PREFIX}direction={d}")?;
        }
        writeln!(out)?;
        writeln!(out, "\\data\\")?;
        for k in 1..=self.order {
            writeln!(out, "ngram {}={}", k, self.len(k))?;
        }
        for k in 1..=self.order {
            writeln!(out)?;
            writeln!(out, "\\{k}-grams:")?;
            for (tokens, e) in self.grams(k) {
                write!(out, "{}\t{}", e.log10_prob, tokens.join(" "))?;
                match e.log10_backoff {
                    Some(b) => writeln!(out, "\t{b}")?,
                    None => writeln!(out)?,
                }
            }
        }
        writeln!(out)?;
        writeln!(out, "\\end\\")?;
        out.flush()
    }

    /// Read an ARPA model. Header comments written by [`write_arpa`] restore
    /// the training metadata; other text before `\data\` is ignored.
    ///
    /// [`write_arpa`]: NGramModel::write_arpa
    pub fn read_arpa<R: BufRead>(source: R) -> Result<NGramModel> {
        ArpaReader::new(source).read()
    }
}

struct ArpaReader<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> ArpaReader<R> {
    fn new(source: R) -> Self {
        ArpaReader { lines: source.lines(), line_no: 0 }
    }

    fn next_line(&mut self) -> Result<Option<String>> {
        match self.lines.next() {
            None => Ok(None),
            Some(line) => {
                self.line_no += 1;
                let mut line = line?;
                if line.ends_with('\r') {
                    line.pop();
                }
                Ok(Some(line))
            }
        }
    }

    fn expect_line(&mut self, what: &str) -> Result<String> {
        self.next_line()?
            .ok_or_else(|| Error::parse(self.line_no + 1, format!("unexpected end of file, expected {what}")))
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(self.line_no, message)
    }

    fn read(mut self) -> Result<NGramModel> {
        let mut meta = ModelMeta::default();
        let mut meta_order = None;
        loop {
            let line = self.expect_line("\\data\\")?;
            if line.trim() == "\\data\\" {
                break;
            }
            if let Some(rest) = line.strip_prefix(META_PREFIX) {
                self.parse_meta(rest, &mut meta, &mut meta_order)?;
            }
        }

        let mut declared: Vec<usize> = Vec::new();
        let mut line = self.expect_line("ngram counts")?;
        while let Some(rest) = line.trim().strip_prefix("ngram ") {
            let (k, n) = rest.split_once('=').ok_or_else(|| self.err("expected \"ngram k=count\""))?;
            let k: usize = k.trim().parse().map_err(|_| self.err(format!("bad order \"{k}\"")))?;
            let n: usize = n.trim().parse().map_err(|_| self.err(format!("bad count \"{n}\"")))?;
            if k != declared.len() + 1 {
                return Err(self.err(format!("expected ngram {}=..., found order {k}", declared.len() + 1)));
            }
            declared.push(n);
            line = self.expect_line("n-gram section")?;
        }
        if declared.is_empty() {
            return Err(self.err("no \"ngram k=count\" lines after \\data\\"));
        }
        let order = declared.len();
        if let Some(o) = meta_order {
            if o != order {
                return Err(self.err(format!("metadata order {o} disagrees with {order} declared orders")));
            }
        }

        let mut vocab = Vocab::new();
        let mut entries: Vec<GramMap<ProbEntry>> = Vec::with_capacity(order);
        let mut has_unk = false;
        for (i, &expected) in declared.iter().enumerate() {
            let k = i + 1;
            while line.trim().is_empty() {
                line = self.expect_line(&format!("\\{k}-grams:"))?;
            }
            if line.trim() != format!("\\{k}-grams:") {
                return Err(self.err(format!("expected \\{k}-grams:, found \"{}\"", line.trim())));
            }
            let header_line = self.line_no;
            let mut map = GramMap::default();
            map.reserve(expected);
            loop {
                line = self.expect_line("n-gram entry or section end")?;
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('\\') {
                    break;
                }
                if map.len() == expected {
                    return Err(self.err(format!("more than the {expected} declared {k}-grams")));
                }
                let (gram, entry) = self.parse_entry(trimmed, k, k == order, &mut vocab)?;
                if k == 1 && vocab.token(gram[0]) == crate::vocab::UNK {
                    has_unk = true;
                }
                if map.insert(gram, entry).is_some() {
                    return Err(self.err("duplicate n-gram"));
                }
            }
            if map.len() != expected {
                return Err(self.err(format!(
                    "section \\{k}-grams: starting at line {header_line} lists {} entries but the header declares ngram {k}={expected}",
                    map.len()
                )));
            }
            if k == 1 && !has_unk {
                return Err(Error::parse(header_line, "unigram section has no <unk> entry"));
            }
            entries.push(map);
        }
        while line.trim().is_empty() {
            line = self.expect_line("\\end\\")?;
        }
        if line.trim() != "\\end\\" {
            return Err(self.err(format!("expected \\end\\, found \"{}\"", line.trim())));
        }
        Ok(NGramModel { order, vocab, entries, meta })
    }

    fn parse_meta(&self, rest: &str, meta: &mut ModelMeta, order: &mut Option<usize>) -> Result<()> {
        for field in rest.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or_else(|| self.err(format!("bad metadata field \"{field}\"")))?;
            let flag = || -> Result<bool> {
                value.parse().map_err(|_| self.err(format!("metadata {key} must be true or false")))
            };
            match key {
                "order" => *order = Some(value.parse().map_err(|_| self.err("bad metadata order"))?),
                "direction" => {
                    meta.direction = Some(value.parse().map_err(|e: String| self.err(e))?);
                }
                "filter_tags" => meta.prep.get_or_insert_with(PrepConfig::default).filter_tags = flag()?,
                "filter_urls" => meta.prep.get_or_insert_with(PrepConfig::default).filter_urls = flag()?,
                "split_punct" => meta.prep.get_or_insert_with(PrepConfig::default).split_punct = flag()?,
                "lowercase" => meta.prep.get_or_insert_with(PrepConfig::default).lowercase = flag()?,
                "boundaries" => meta.prep.get_or_insert_with(PrepConfig::default).boundaries = flag()?,
                _ => {}
            }
        }
        Ok(())
    }

    fn parse_entry(&self, line: &str, k: usize, top: bool, vocab: &mut Vocab) -> Result<(Gram, ProbEntry)> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != k + 1 && fields.len() != k + 2 {
            return Err(self.err(format!("expected {} or {} fields for a {k}-gram, found {}", k + 1, k + 2, fields.len())));
        }
        let number = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| !v.is_nan())
                .ok_or_else(|| self.err(format!("non-numeric field \"{s}\"")))
        };
        let log10_prob = number(fields[0])?;
        let mut gram = Gram::with_capacity(k);
        for t in &fields[1..=k] {
            let id = if k == 1 {
                vocab.intern(t)
            } else {
                vocab.get(t).ok_or_else(|| self.err(format!("token \"{t}\" has no unigram entry")))?
            };
            gram.push(id);
        }
        let backoff = match fields.get(k + 1) {
            Some(b) => Some(number(b)?),
            None => None,
        };
        let log10_backoff = if top { None } else { Some(backoff.unwrap_or(0.0)) };
        Ok((gram, ProbEntry { log10_prob, log10_backoff }))
    }
}
