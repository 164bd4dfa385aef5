//! Per-hashtag scoring, funniest-first ranking and pairwise predictions.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NGramModel;
use crate::textprep::PrepConfig;

/// Which end of the probability scale counts as funnier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Funnier tweets are more probable (model trained on funny tweets).
    MostLike,
    /// Funnier tweets are less probable (model trained on news text).
    LeastLike,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::MostLike => "most-like",
            Direction::LeastLike => "least-like",
        })
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "most-like" => Ok(Direction::MostLike),
            "least-like" => Ok(Direction::LeastLike),
            other => Err(format!("unknown direction \"{other}\" (expected most-like or least-like)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tweet {
    pub id: String,
    pub text: String,
    /// 2 = winning tweet, 1 = top ten, 0 = other.
    pub gold: Option<u8>,
}

/// The tweets answering one hashtag prompt.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HashtagSet {
    pub name: String,
    pub tweets: Vec<Tweet>,
}

impl HashtagSet {
    /// Parse `tweet_id<TAB>text[<TAB>gold_label]` lines. Blank lines are
    /// skipped; ids must be unique.
    pub fn from_tsv<R: BufRead>(name: impl Into<String>, source: R) -> Result<HashtagSet> {
        let mut tweets = Vec::new();
        let mut seen = HashSet::new();
        for (i, line) in source.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let id = fields.next().unwrap_or_default().trim();
            let text = fields
                .next()
                .ok_or_else(|| Error::parse(line_no, "expected tweet_id<TAB>text[<TAB>label]"))?;
            let gold = match fields.next().map(str::trim) {
                None | Some("") => None,
                Some(label) => Some(match label {
                    "0" => 0,
                    "1" => 1,
                    "2" => 2,
                    _ => return Err(Error::parse(line_no, format!("gold label \"{label}\" is not 0, 1 or 2"))),
                }),
            };
            if fields.next().is_some() {
                return Err(Error::parse(line_no, "more than three tab-separated fields"));
            }
            if id.is_empty() {
                return Err(Error::parse(line_no, "empty tweet id"));
            }
            if !seen.insert(id.to_owned()) {
                return Err(Error::parse(line_no, format!("duplicate tweet id {id}")));
            }
            tweets.push(Tweet { id: id.to_owned(), text: text.to_owned(), gold });
        }
        Ok(HashtagSet { name: name.into(), tweets })
    }

    /// Read `<Hashtag_Name>.tsv`; the file stem becomes the hashtag name.
    pub fn read(path: &Path) -> Result<HashtagSet> {
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let file = std::fs::File::open(path)?;
        Self::from_tsv(name, std::io::BufReader::new(file))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredTweet {
    pub tweet_id: String,
    pub text: String,
    /// log10 probability under the scoring model.
    pub score: f64,
}

/// Score every tweet of `set`, preserving input order.
pub fn score_hashtag(set: &HashtagSet, model: &NGramModel, config: &PrepConfig) -> Vec<ScoredTweet> {
    set.tweets
        .par_iter()
        .map(|t| ScoredTweet {
            tweet_id: t.id.clone(),
            text: t.text.clone(),
            score: model.score_sequence(&config.apply(&t.text), config.boundaries),
        })
        .collect()
}

/// Order tweets funniest first. Ties go to the smaller tweet id.
pub fn rank(mut scored: Vec<ScoredTweet>, direction: Direction) -> Vec<ScoredTweet> {
    scored.sort_by(|a, b| {
        let by_score = match direction {
            Direction::MostLike => b.score.total_cmp(&a.score),
            Direction::LeastLike => a.score.total_cmp(&b.score),
        };
        by_score.then_with(|| a.tweet_id.cmp(&b.tweet_id))
    });
    scored
}

/// A pairwise prediction: `label` is 1 when `id_a` is funnier, 0 when `id_b` is.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pair {
    pub id_a: String,
    pub id_b: String,
    pub label: u8,
}

/// Every unordered pair of a funniest-first ranking, as (earlier, later, 1).
pub fn pairwise(ranked: &[ScoredTweet]) -> Vec<Pair> {
    let mut out = Vec::with_capacity(ranked.len() * ranked.len().saturating_sub(1) / 2);
    for (i, a) in ranked.iter().enumerate() {
        for b in &ranked[i + 1..] {
            out.push(Pair { id_a: a.tweet_id.clone(), id_b: b.tweet_id.clone(), label: 1 });
        }
    }
    out
}

/// Pairwise output: `id_a<TAB>id_b<TAB>label` per line.
pub fn write_pairs<W: Write>(mut out: W, pairs: &[Pair]) -> std::io::Result<()> {
    for p in pairs {
        writeln!(out, "{}\t{}\t{}", p.id_a, p.id_b, p.label)?;
    }
    out.flush()
}

pub fn read_pairs<R: BufRead>(source: R) -> Result<Vec<Pair>> {
    let mut pairs = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [id_a, id_b, label] = fields[..] else {
            return Err(Error::parse(i + 1, "expected id_a<TAB>id_b<TAB>label"));
        };
        let label = match label.trim() {
            "0" => 0,
            "1" => 1,
            other => return Err(Error::parse(i + 1, format!("pair label \"{other}\" is not 0 or 1"))),
        };
        pairs.push(Pair { id_a: id_a.trim().to_owned(), id_b: id_b.trim().to_owned(), label });
    }
    Ok(pairs)
}

/// Ranking output: one tweet id per line, funniest first.
pub fn write_ranking<W: Write>(mut out: W, ranked: &[ScoredTweet]) -> std::io::Result<()> {
    for t in ranked {
        writeln!(out, "{}", t.tweet_id)?;
    }
    out.flush()
}

pub fn read_ranking<R: BufRead>(source: R) -> Result<Vec<String>> {
    let mut ids = Vec::new();
    for line in source.lines() {
        let line = line?;
        let id = line.trim();
        if !id.is_empty() {
            ids.push(id.to_owned());
        }
    }
    Ok(ids)
}
