//! Tokenization, tweet filtering and n-gram extraction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vocab::{BOS, EOS};

/// Pre-processing switches applied to every corpus line and every scored tweet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct PrepConfig {
    /// Drop tokens starting with `#` or `@`.
    pub filter_tags: bool,
    /// Drop tokens starting with `http://`, `https://` or `www.`.
    pub filter_urls: bool,
    /// Split ASCII punctuation into separate tokens.
    pub split_punct: bool,
    /// ASCII case folding.
    pub lowercase: bool,
    /// Pad each line with `<s>` / `</s>`.
    pub boundaries: bool,
}

impl Default for PrepConfig {
    /// The best tweet-corpus setting: keep tags, no boundaries, case
    /// sensitive, whitespace tokenization only, URLs removed.
    fn default() -> Self {
        PrepConfig {
            filter_tags: false,
            filter_urls: true,
            split_punct: false,
            lowercase: false,
            boundaries: false,
        }
    }
}

impl PrepConfig {
    /// The same switches with both filters disabled, used for news text.
    pub fn without_filters(self) -> Self {
        PrepConfig { filter_tags: false, filter_urls: false, ..self }
    }

    /// `tokenize` followed by `filter`.
    pub fn apply(&self, line: &str) -> TokenSeq {
        filter(tokenize(line, self), self)
    }
}

/// An ordered list of whitespace-free, non-empty tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    pub fn new(tokens: Vec<String>) -> Self {
        debug_assert!(tokens.iter().all(|t| !t.is_empty() && !t.contains(char::is_whitespace)));
        TokenSeq(tokens)
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }
}

impl<S: Into<String>> FromIterator<S> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenSeq::new(iter.into_iter().map(Into::into).collect())
    }
}

impl From<Vec<String>> for TokenSeq {
    fn from(tokens: Vec<String>) -> Self {
        TokenSeq::new(tokens)
    }
}

/// A contiguous run of `order` tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NGram {
    tokens: Vec<String>,
}

impl NGram {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn order(&self) -> usize {
        self.tokens.len()
    }
}

impl fmt::Display for NGram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tokens.join(" "))
    }
}

fn is_sigil(c: char) -> bool {
    c == '#' || c == '@'
}

fn is_url(token: &str) -> bool {
    let lower = token.to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

/// Split one whitespace-delimited chunk on ASCII punctuation. A `#` or `@`
/// that starts a word stays attached to it.
fn split_chunk(chunk: &str, out: &mut Vec<String>) {
    let mut current = String::new();
    let mut chars = chunk.chars().peekable();
    while let Some(c) = chars.next() {
        if !c.is_ascii_punctuation() {
            current.push(c);
            continue;
        }
        let starts_word = current.is_empty()
            && is_sigil(c)
            && chars.peek().is_some_and(|n| !n.is_ascii_punctuation());
        if starts_word {
            current.push(c);
            continue;
        }
        if !current.is_empty() {
            out.push(std::mem::take(&mut current));
        }
        out.push(c.to_string());
    }
    if !current.is_empty() {
        out.push(current);
    }
}

/// Split a line into tokens on Unicode whitespace and, when
/// `config.split_punct` is set, on ASCII punctuation.
///
/// URL tokens are never split so that URL filtering still sees them whole.
pub fn tokenize(line: &str, config: &PrepConfig) -> TokenSeq {
    let mut tokens = Vec::new();
    for chunk in line.split_whitespace() {
        if config.split_punct && !is_url(chunk) {
            split_chunk(chunk, &mut tokens);
        } else {
            tokens.push(chunk.to_owned());
        }
    }
    if config.lowercase {
        tokens.iter_mut().for_each(|t| t.make_ascii_lowercase());
    }
    TokenSeq(tokens)
}

/// Remove URL tokens (if `filter_urls`) and `#`/`@` tokens (if `filter_tags`).
pub fn filter(seq: TokenSeq, config: &PrepConfig) -> TokenSeq {
    if !config.filter_urls && !config.filter_tags {
        return seq;
    }
    let kept = seq
        .0
        .into_iter()
        .filter(|t| !(config.filter_urls && is_url(t)))
        .filter(|t| !(config.filter_tags && t.starts_with(is_sigil)))
        .collect();
    TokenSeq(kept)
}

/// Pads `tokens` with one `<s>` and one `</s>` when `boundaries` is set.
pub(crate) fn padded(tokens: &[String], boundaries: bool) -> Vec<&str> {
    let mut out = Vec::with_capacity(tokens.len() + 2);
    if boundaries {
        out.push(BOS);
    }
    out.extend(tokens.iter().map(String::as_str));
    if boundaries {
        out.push(EOS);
    }
    out
}

/// All contiguous windows of length `order`, optionally over the
/// boundary-padded sequence. The lone `<s>` unigram is never produced.
pub fn extract_ngrams(seq: &TokenSeq, order: usize, boundaries: bool) -> Result<Vec<NGram>> {
    if order == 0 {
        return Err(Error::InvalidOrder(order));
    }
    let padded = padded(&seq.0, boundaries);
    if padded.len() < order {
        return Ok(Vec::new());
    }
    let grams = padded
        .windows(order)
        .filter(|w| !w.iter().all(|t| *t == BOS))
        .map(|w| NGram { tokens: w.iter().map(|t| t.to_string()).collect() })
        .collect();
    Ok(grams)
}
