//! Surface lexical statistics: caption length, vocabulary size and segmental
//! type–token ratios over unigram and bigram streams.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Dataset, Group, TokenizedCaption};

/// Tokens (or bigrams) per type–token window.
pub const DEFAULT_WINDOW: usize = 1000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexError {
    #[error("no captions to measure")]
    EmptyInput,
    #[error("window size must be positive")]
    InvalidWindow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LexReport {
    /// Mean tokens per caption.
    pub asl: f64,
    /// Population standard deviation of caption length.
    pub sdsl: f64,
    pub n_types: usize,
    /// Mean type–token ratio over full unigram windows.
    pub ttr1: f64,
    /// Mean type–token ratio over full within-caption bigram windows.
    pub ttr2: f64,
    pub n_captions: usize,
    pub n_tokens: usize,
    pub n_bigrams: usize,
    /// A stream was shorter than one window and was measured whole.
    pub short_stream: bool,
}

/// Mean over consecutive non-overlapping windows of (types / window).
///
/// A trailing partial window is ignored unless it is the only one, in which
/// case the ratio is taken over the whole stream. Returns the ratio and
/// whether the short-stream fallback applied. An empty stream yields 0.
fn segmental_ttr<T: std::hash::Hash + Eq>(stream: &[T], window: usize) -> (f64, bool) {
    if stream.is_empty() {
        return (0.0, true);
    }
    if stream.len() < window {
        let types: HashSet<&T> = stream.iter().collect();
        return (types.len() as f64 / stream.len() as f64, true);
    }
    let chunks = stream.chunks_exact(window);
    let n = chunks.len();
    let sum: f64 = chunks
        .map(|chunk| chunk.iter().collect::<HashSet<&T>>().len() as f64 / window as f64)
        .sum();
    (sum / n as f64, false)
}

/// Lexical statistics with the default 1,000-item window.
pub fn lexical_stats<'a, I>(captions: I) -> Result<LexReport, LexError>
where
    I: IntoIterator<Item = &'a TokenizedCaption>,
{
    lexical_stats_windowed(captions, DEFAULT_WINDOW)
}

/// Lexical statistics over captions sorted by (image_id, describer_id), so
/// the windowed ratios do not depend on input order.
pub fn lexical_stats_windowed<'a, I>(captions: I, window: usize) -> Result<LexReport, LexError>
where
    I: IntoIterator<Item = &'a TokenizedCaption>,
{
    if window == 0 {
        return Err(LexError::InvalidWindow);
    }
    let mut captions: Vec<&TokenizedCaption> = captions.into_iter().collect();
    if captions.is_empty() {
        return Err(LexError::EmptyInput);
    }
    captions.sort_by(|a, b| a.key().cmp(&b.key()));

    let n_captions = captions.len();
    let lengths: Vec<f64> = captions.iter().map(|c| c.tokens.len() as f64).collect();
    let asl = lengths.iter().sum::<f64>() / n_captions as f64;
    let sdsl = (lengths.iter().map(|l| (l - asl).powi(2)).sum::<f64>() / n_captions as f64).sqrt();

    let unigrams: Vec<&str> = captions.iter().flat_map(|c| c.tokens.iter().map(String::as_str)).collect();
    let bigrams: Vec<(&str, &str)> = captions
        .iter()
        .flat_map(|c| c.tokens.windows(2).map(|w| (w[0].as_str(), w[1].as_str())))
        .collect();
    let n_types = unigrams.iter().collect::<HashSet<_>>().len();
    let (ttr1, short1) = segmental_ttr(&unigrams, window);
    let (ttr2, short2) = segmental_ttr(&bigrams, window);
    if short1 || short2 {
        log::warn!(
            "stream shorter than one {window}-item window ({} tokens, {} bigrams); ratio taken over the whole stream",
            unigrams.len(),
            bigrams.len()
        );
    }
    Ok(LexReport {
        asl,
        sdsl,
        n_types,
        ttr1,
        ttr2,
        n_captions,
        n_tokens: unigrams.len(),
        n_bigrams: bigrams.len(),
        short_stream: short1 || short2,
    })
}

/// Label of a row in [`per_source_stats`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Source {
    Describer(String),
    Pooled(Group),
}

impl Source {
    pub fn label(&self) -> &str {
        match self {
            Source::Describer(id) => id,
            Source::Pooled(g) => g.as_str(),
        }
    }
}

/// One row per describer (sorted by id), then pooled rows for each group
/// present in the dataset.
pub fn per_source_stats(dataset: &Dataset, window: usize) -> Result<Vec<(Source, LexReport)>, LexError> {
    let mut by_describer: BTreeMap<&str, Vec<&TokenizedCaption>> = BTreeMap::new();
    for c in dataset.captions() {
        by_describer.entry(c.describer_id.as_str()).or_default().push(c);
    }
    let mut rows = Vec::with_capacity(by_describer.len() + 2);
    for (id, caps) in by_describer {
        rows.push((Source::Describer(id.to_owned()), lexical_stats_windowed(caps, window)?));
    }
    for group in Group::ALL {
        let caps: Vec<&TokenizedCaption> = dataset.captions().filter(|c| c.group == group).collect();
        if !caps.is_empty() {
            rows.push((Source::Pooled(group), lexical_stats_windowed(caps, window)?));
        }
    }
    Ok(rows)
}
