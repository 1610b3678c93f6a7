use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{clean_text, tokenize, CorpusError, Dataset, Group, TokenizedCaption};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Jsonl,
    Csv,
}

impl InputFormat {
    /// Guess from the file extension; anything but `.csv` is JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => InputFormat::Csv,
            _ => InputFormat::Jsonl,
        }
    }
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(InputFormat::Jsonl),
            "csv" => Ok(InputFormat::Csv),
            other => Err(format!("unknown format {other:?} (expected jsonl or csv)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DropReason {
    EmptyAfterTokenization,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedRecord {
    pub line: usize,
    pub image_id: String,
    pub describer_id: String,
    pub reason: DropReason,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub records_read: usize,
    pub dropped: Vec<DroppedRecord>,
}

impl LoadReport {
    pub fn records_dropped(&self) -> usize {
        self.dropped.len()
    }
}

impl fmt::Display for LoadReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} read, {} dropped", self.records_read, self.records_dropped())?;
        for d in &self.dropped {
            write!(f, "\n  line {}: ({}, {}) {:?}", d.line, d.image_id, d.describer_id, d.reason)?;
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRecord {
    image_id: String,
    describer_id: String,
    group: String,
    #[serde(default)]
    caption: Option<String>,
    #[serde(default)]
    tokens: Option<Vec<String>>,
}

enum Payload {
    Text(String),
    Tokens(Vec<String>),
}

struct Record {
    line: usize,
    image_id: String,
    describer_id: String,
    group: Group,
    payload: Payload,
}

fn parse_err(line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::Parse { line, message: message.into() }
}

fn check_keys(line: usize, image_id: &str, describer_id: &str, group: &str) -> Result<Group, CorpusError> {
    if image_id.is_empty() {
        return Err(parse_err(line, "empty image_id"));
    }
    if describer_id.is_empty() {
        return Err(parse_err(line, "empty describer_id"));
    }
    group.parse::<Group>().map_err(|m| parse_err(line, m))
}

fn read_jsonl(content: &str) -> Result<Vec<Record>, CorpusError> {
    let mut out = Vec::new();
    for (idx, raw_line) in content.lines().enumerate() {
        let line = idx + 1;
        if raw_line.trim().is_empty() {
            continue;
        }
        let rec: JsonRecord = serde_json::from_str(raw_line).map_err(|e| parse_err(line, e.to_string()))?;
        let group = check_keys(line, &rec.image_id, &rec.describer_id, &rec.group)?;
        let payload = match (rec.caption, rec.tokens) {
            (Some(text), None) => Payload::Text(text),
            (None, Some(tokens)) => Payload::Tokens(tokens),
            (Some(_), Some(_)) => return Err(parse_err(line, "record has both caption and tokens")),
            (None, None) => return Err(parse_err(line, "record has neither caption nor tokens")),
        };
        out.push(Record { line, image_id: rec.image_id, describer_id: rec.describer_id, group, payload });
    }
    Ok(out)
}

fn read_csv(content: &str) -> Result<Vec<Record>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(content.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let expected = ["image_id", "describer_id", "group", "caption"];
    if headers.len() != expected.len() || headers.iter().zip(expected).any(|(h, e)| h.trim() != e) {
        return Err(parse_err(1, format!("header must be {}", expected.join(","))));
    }
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() != 4 {
            return Err(parse_err(line, format!("expected 4 fields, found {}", row.len())));
        }
        let group = check_keys(line, &row[0], &row[1], &row[2])?;
        out.push(Record {
            line,
            image_id: row[0].to_owned(),
            describer_id: row[1].to_owned(),
            group,
            payload: Payload::Text(row[3].to_owned()),
        });
    }
    Ok(out)
}

fn pretokenized(line: usize, tokens: Vec<String>) -> Result<Vec<String>, CorpusError> {
    let mut out = Vec::with_capacity(tokens.len());
    for tok in tokens {
        let cleaned = clean_text(&tok).to_ascii_lowercase();
        if cleaned.contains(' ') {
            return Err(parse_err(line, format!("token {tok:?} contains whitespace")));
        }
        if !cleaned.is_empty() {
            out.push(cleaned);
        }
    }
    Ok(out)
}

/// Parse dataset content that is already in memory.
pub fn load_dataset_from_str(
    content: &str,
    format: InputFormat,
    strict: bool,
) -> Result<(Dataset, LoadReport), CorpusError> {
    let records = match format {
        InputFormat::Jsonl => read_jsonl(content)?,
        InputFormat::Csv => read_csv(content)?,
    };
    let mut report = LoadReport { records_read: records.len(), dropped: Vec::new() };
    let mut seen = HashSet::new();
    let mut captions = Vec::with_capacity(records.len());
    for rec in records {
        if !seen.insert((rec.image_id.clone(), rec.describer_id.clone())) {
            return Err(CorpusError::DuplicateKey {
                line: rec.line,
                image_id: rec.image_id,
                describer_id: rec.describer_id,
            });
        }
        let tokens = match rec.payload {
            Payload::Text(text) => tokenize(&clean_text(&text)).unwrap_or_default(),
            Payload::Tokens(tokens) => pretokenized(rec.line, tokens)?,
        };
        if tokens.is_empty() {
            log::warn!(
                "line {}: ({}, {}) dropped: empty after tokenization",
                rec.line,
                rec.image_id,
                rec.describer_id
            );
            report.dropped.push(DroppedRecord {
                line: rec.line,
                image_id: rec.image_id,
                describer_id: rec.describer_id,
                reason: DropReason::EmptyAfterTokenization,
            });
            continue;
        }
        captions.push(TokenizedCaption {
            image_id: rec.image_id,
            describer_id: rec.describer_id,
            group: rec.group,
            tokens,
        });
    }
    let dataset = Dataset::from_captions(captions, strict)?;
    Ok((dataset, report))
}

/// Load, clean, tokenize and validate a caption dataset file.
pub fn load_dataset(path: &Path, format: InputFormat, strict: bool) -> Result<(Dataset, LoadReport), CorpusError> {
    let content = std::fs::read_to_string(path)?;
    load_dataset_from_str(&content, format, strict)
}
