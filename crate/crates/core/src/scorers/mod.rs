//! Scorers turn a [`Dataset`] into per-caption surprisal records.
//!
//! Two sources are supported: the leave-one-image-out Kneser–Ney scorer and
//! surprisals computed elsewhere and exchanged as JSONL.

mod interchange;
mod ngram_scorer;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Dataset, Group};
use crate::ngram::NgramError;
use crate::scalar::LogBase;

pub use interchange::{
    export_interchange, import_external_surprisals, import_interchange_str, validate_interchange_str,
    InterchangeRecord, ValidationReport,
};
pub use ngram_scorer::{score_dataset_ngram, score_with_table, NgramScorerConfig};

#[derive(Debug, Error)]
pub enum ScorerError {
    #[error("leave-one-image-out training pool is empty (dataset has {0} image(s))")]
    EmptyTrainingPool(usize),
    #[error(transparent)]
    Ngram(#[from] NgramError),
    #[error("non-finite surprisal for ({image_id}, {describer_id}); use a positive floor")]
    NonFiniteSurprisal { image_id: String, describer_id: String },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("line {line}: no dataset caption ({image_id:?}, {describer_id:?})")]
    UnknownCaption { line: usize, image_id: String, describer_id: String },
    #[error("line {line}: negative surprisal {value}")]
    NegativeSurprisal { line: usize, value: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Surprisals of one caption under one scorer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurprisalRecord {
    pub image_id: String,
    pub describer_id: String,
    pub group: Group,
    pub scorer_id: String,
    /// Scored tokens, aligned with `per_token_surprisal`.
    pub tokens: Vec<String>,
    pub per_token_surprisal: Vec<f64>,
    pub mean_surprisal: f64,
}

impl SurprisalRecord {
    pub fn key(&self) -> (&str, &str) {
        (&self.image_id, &self.describer_id)
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Records for a whole dataset under one scorer, sorted by
/// (image_id, describer_id).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredDataset {
    pub scorer_id: String,
    /// Fingerprint of the dataset the records were joined against.
    pub fingerprint: String,
    pub log_base: LogBase,
    pub records: Vec<SurprisalRecord>,
    /// Dataset captions the scorer produced nothing for.
    pub missing: Vec<(String, String)>,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl ScoredDataset {
    pub fn is_complete(&self) -> bool {
        self.missing.is_empty()
    }

    pub fn get(&self, image_id: &str, describer_id: &str) -> Option<&SurprisalRecord> {
        self.records
            .binary_search_by(|r| r.key().cmp(&(image_id, describer_id)))
            .ok()
            .map(|i| &self.records[i])
    }

    /// Re-express every surprisal in another log base.
    pub fn to_log_base(mut self, base: LogBase) -> Self {
        let factor = self.log_base.factor_to(base);
        if factor != 1.0 {
            for r in &mut self.records {
                r.per_token_surprisal.iter_mut().for_each(|v| *v *= factor);
                r.mean_surprisal = mean(&r.per_token_surprisal);
            }
        }
        self.log_base = base;
        self
    }

    /// Rename the scorer on the dataset and all of its records.
    pub fn with_scorer_id(mut self, scorer_id: &str) -> Self {
        self.scorer_id = scorer_id.to_owned();
        for r in &mut self.records {
            r.scorer_id = scorer_id.to_owned();
        }
        self
    }

    pub(crate) fn finish(
        scorer_id: String,
        dataset: &Dataset,
        log_base: LogBase,
        mut records: Vec<SurprisalRecord>,
        warnings: Vec<String>,
    ) -> Self {
        records.sort_by(|a, b| a.key().cmp(&b.key()));
        let mut missing: Vec<(String, String)> = dataset
            .captions()
            .filter(|c| records.binary_search_by(|r| r.key().cmp(&c.key())).is_err())
            .map(|c| (c.image_id.clone(), c.describer_id.clone()))
            .collect();
        missing.sort();
        Self { scorer_id, fingerprint: dataset.fingerprint(), log_base, records, missing, warnings }
    }
}
