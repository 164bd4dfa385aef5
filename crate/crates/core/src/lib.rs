//! N-gram language modelling for humor ranking.
//!
//! The crate covers the whole pipeline: tweet and sentence pre-processing
//! ([`textprep`]), exact n-gram counting with Kneser-Ney count adjustment
//! ([`counts`]), interpolated modified Kneser-Ney estimation ([`smoothing`]),
//! a back-off model with ARPA serialization ([`model`]), per-hashtag scoring
//! and ranking ([`ranker`]) and the pairwise accuracy / inversion distance
//! metrics ([`eval`]).

pub mod counts;
pub mod error;
pub mod eval;
pub mod model;
pub mod ranker;
pub mod smoothing;
pub mod textprep;
pub mod vocab;

pub use counts::{count_corpus, count_corpus_parallel, count_of_counts, count_sequences, CountOfCounts, CountTable};
pub use error::{Error, Result};
pub use eval::{
    accuracy_a, distance_b, GoldTiers, Metric, MetricReport, PairwiseAccuracy, Predictions, ReportRow,
    TierInversionDistance,
};
pub use model::{ModelMeta, NGramModel, ProbEntry};
pub use ranker::{
    pairwise, rank, read_pairs, read_ranking, score_hashtag, write_pairs, write_ranking, Direction, HashtagSet,
    Pair, ScoredTweet, Tweet,
};
pub use smoothing::{estimate_discounts, estimate_model, Degenerate, Discounts};

pub use textprep::{extract_ngrams, filter, tokenize, NGram, PrepConfig, TokenSeq};
pub use vocab::{Vocab, BOS, EOS, UNK};
