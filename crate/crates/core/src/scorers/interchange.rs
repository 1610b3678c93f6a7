//! Surprisal interchange files: one JSON object per caption,
//! `{image_id, describer_id, scorer_id, tokens, surprisal, log_base}`.
//! `log_base` is the number 2 or the string "e"; natural-log files are
//! converted to bits on import.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{mean, ScoredDataset, ScorerError, SurprisalRecord};
use crate::corpus::Dataset;
use crate::ngram::EOS_TOKEN;
use crate::scalar::LogBase;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterchangeRecord {
    pub image_id: String,
    pub describer_id: String,
    pub scorer_id: String,
    pub tokens: Vec<String>,
    pub surprisal: Vec<f64>,
    pub log_base: LogBase,
}

fn format_err(line: usize, message: impl Into<String>) -> ScorerError {
    ScorerError::Format { line, message: message.into() }
}

/// Parse and check one line: schema, array lengths, finiteness, sign.
fn parse_line(line: usize, text: &str) -> Result<InterchangeRecord, ScorerError> {
    let rec: InterchangeRecord = serde_json::from_str(text).map_err(|e| format_err(line, e.to_string()))?;
    if rec.image_id.is_empty() || rec.describer_id.is_empty() {
        return Err(format_err(line, "empty image_id or describer_id"));
    }
    if rec.surprisal.is_empty() {
        return Err(format_err(line, "empty surprisal array"));
    }
    if rec.tokens.len() != rec.surprisal.len() {
        return Err(format_err(
            line,
            format!("{} tokens but {} surprisal values", rec.tokens.len(), rec.surprisal.len()),
        ));
    }
    if let Some(&value) = rec.surprisal.iter().find(|v| !v.is_finite()) {
        return Err(format_err(line, format!("non-finite surprisal {value}")));
    }
    if let Some(&value) = rec.surprisal.iter().find(|&&v| v < 0.0) {
        return Err(ScorerError::NegativeSurprisal { line, value });
    }
    Ok(rec)
}

fn records(content: &str) -> impl Iterator<Item = (usize, &str)> {
    content.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty())
}

/// Outcome of checking an interchange file without a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub n_records: usize,
    pub scorer_ids: Vec<String>,
    /// Present when any record is in nats; surprisals are multiplied by
    /// this factor (1/ln 2) on import.
    pub conversion_factor: Option<f64>,
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "valid, {} records", self.n_records)?;
        if let Some(k) = self.conversion_factor {
            write!(f, "; log_base e converted to bits downstream (factor 1/ln 2 = {k:.6})")?;
        }
        Ok(())
    }
}

pub fn validate_interchange_str(content: &str) -> Result<ValidationReport, ScorerError> {
    let mut n_records = 0;
    let mut scorer_ids: Vec<String> = Vec::new();
    let mut nats = false;
    for (line, text) in records(content) {
        let rec = parse_line(line, text)?;
        n_records += 1;
        nats |= rec.log_base == LogBase::E;
        if !scorer_ids.contains(&rec.scorer_id) {
            scorer_ids.push(rec.scorer_id);
        }
    }
    Ok(ValidationReport {
        n_records,
        scorer_ids,
        conversion_factor: nats.then(|| 1.0 / std::f64::consts::LN_2),
    })
}

/// Join interchange content against `dataset`.
///
/// Per-token values are taken verbatim (after conversion to bits); caption
/// means are always recomputed. Token sequences that differ from the dataset
/// tokenization produce warnings, not errors.
pub fn import_interchange_str(content: &str, dataset: &Dataset) -> Result<ScoredDataset, ScorerError> {
    let mut scorer_id: Option<String> = None;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for (line, text) in records(content) {
        let rec = parse_line(line, text)?;
        match &scorer_id {
            None => scorer_id = Some(rec.scorer_id.clone()),
            Some(id) if *id != rec.scorer_id => {
                return Err(format_err(line, format!("scorer_id {:?} differs from {id:?}", rec.scorer_id)));
            }
            Some(_) => {}
        }
        let Some(caption) = dataset.caption(&rec.image_id, &rec.describer_id) else {
            return Err(ScorerError::UnknownCaption {
                line,
                image_id: rec.image_id,
                describer_id: rec.describer_id,
            });
        };
        if !seen.insert((rec.image_id.clone(), rec.describer_id.clone())) {
            return Err(format_err(line, format!("duplicate record ({}, {})", rec.image_id, rec.describer_id)));
        }
        let words: &[String] = match rec.tokens.split_last() {
            Some((last, rest)) if last == EOS_TOKEN => rest,
            _ => &rec.tokens,
        };
        if words != caption.tokens.as_slice() {
            warnings.push(format!(
                "line {line}: ({}, {}) has {} tokens, dataset has {}",
                rec.image_id,
                rec.describer_id,
                words.len(),
                caption.tokens.len()
            ));
        }
        let per_token: Vec<f64> = match rec.log_base {
            LogBase::Two => rec.surprisal,
            LogBase::E => rec.surprisal.iter().map(|v| v / std::f64::consts::LN_2).collect(),
        };
        out.push(SurprisalRecord {
            image_id: rec.image_id,
            describer_id: rec.describer_id,
            group: caption.group,
            scorer_id: rec.scorer_id,
            tokens: rec.tokens,
            mean_surprisal: mean(&per_token),
            per_token_surprisal: per_token,
        });
    }
    let scorer_id = scorer_id.ok_or_else(|| format_err(0, "no records"))?;
    for w in &warnings {
        log::warn!("{w}");
    }
    let scored = ScoredDataset::finish(scorer_id, dataset, LogBase::Two, out, warnings);
    if !scored.is_complete() {
        log::warn!("{} dataset captions missing from interchange file", scored.missing.len());
    }
    Ok(scored)
}

/// Read an interchange file and join it against `dataset`.
pub fn import_external_surprisals(path: &Path, dataset: &Dataset) -> Result<ScoredDataset, ScorerError> {
    let content = std::fs::read_to_string(path)?;
    import_interchange_str(&content, dataset)
}

/// Write records as interchange JSONL, one line per caption, in record order.
pub fn export_interchange<W: Write>(scored: &ScoredDataset, mut out: W) -> Result<(), ScorerError> {
    for r in &scored.records {
        let rec = InterchangeRecord {
            image_id: r.image_id.clone(),
            describer_id: r.describer_id.clone(),
            scorer_id: r.scorer_id.clone(),
            tokens: r.tokens.clone(),
            surprisal: r.per_token_surprisal.clone(),
            log_base: scored.log_base,
        };
        serde_json::to_writer(&mut out, &rec).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
