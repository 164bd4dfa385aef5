//! Corpus and hashtag file discovery.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use humorlm_core::{HashtagSet, PrepConfig, TokenSeq};
use rayon::prelude::*;

fn is_tsv(path: &Path) -> bool {
    path.extension().is_some_and(|x| x == "tsv")
}

/// Regular files of a directory, sorted by name.
pub fn dir_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("reading directory {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Hashtag files named by `path`: the file itself, or every `.tsv` in a directory.
pub fn hashtag_files(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_dir() {
        let files: Vec<PathBuf> = dir_files(path)?.into_iter().filter(|p| is_tsv(p)).collect();
        if files.is_empty() {
            bail!("no .tsv hashtag files in {}", path.display());
        }
        Ok(files)
    } else {
        Ok(vec![path.to_path_buf()])
    }
}

pub fn read_hashtag(path: &Path) -> Result<HashtagSet> {
    HashtagSet::read(path).with_context(|| format!("reading hashtag file {}", path.display()))
}

/// Lines of a corpus, split into tweets (from hashtag `.tsv` files) and
/// plain text (any other file, one sentence per line).
#[derive(Debug, Default)]
pub struct Corpus {
    pub tweets: Vec<String>,
    pub text: Vec<String>,
}

impl Corpus {
    pub fn load(paths: &[PathBuf]) -> Result<Corpus> {
        let mut corpus = Corpus::default();
        for path in paths {
            let files = if path.is_dir() { dir_files(path)? } else { vec![path.clone()] };
            for file in files {
                if is_tsv(&file) {
                    corpus.tweets.extend(read_hashtag(&file)?.tweets.into_iter().map(|t| t.text));
                } else {
                    let reader = BufReader::new(File::open(&file).with_context(|| format!("opening {}", file.display()))?);
                    for line in reader.lines() {
                        corpus.text.push(line.with_context(|| format!("reading {}", file.display()))?);
                    }
                }
            }
        }
        Ok(corpus)
    }

    /// Tweets get the full configuration; plain text is never filtered.
    pub fn preprocess(&self, config: &PrepConfig) -> Vec<TokenSeq> {
        let text_config = config.without_filters();
        let mut seqs: Vec<TokenSeq> = self.tweets.par_iter().map(|l| config.apply(l)).collect();
        seqs.par_extend(self.text.par_iter().map(|l| text_config.apply(l)));
        seqs
    }
}
