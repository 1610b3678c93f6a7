//! End-to-end runs: load, lexical statistics, scoring, per-image variance
//! and the paired test, with reports written to one directory.

pub mod report;
mod synth;

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{load_dataset, CorpusError, Dataset, InputFormat, LoadReport};
use crate::lexstats::{per_source_stats, LexError, DEFAULT_WINDOW};
use crate::ngram::{NgramCountTable, NgramError, Order, DEFAULT_DISCOUNT, DEFAULT_FLOOR};
use crate::scalar::LogBase;
use crate::scorers::{
    export_interchange, import_external_surprisals, score_with_table, NgramScorerConfig, ScoredDataset, ScorerError,
};
use crate::stats::{group_variance, paired_t_test, GroupVariances, SkippedGroup, StatsError, VarianceKind};
use crate::PairedTest;

pub use synth::{generate_synthetic, write_dataset_jsonl, SyntheticSpec};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Scorer(#[from] ScorerError),
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("scorer {scorer_id}: {source}")]
    Stats { scorer_id: String, source: StatsError },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PipelineError {
    /// 2 configuration, 3 data, 4 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Invariant(_) | PipelineError::Stats { source: StatsError::DatasetMismatch, .. } => 4,
            _ => 3,
        }
    }
}

impl From<NgramError> for PipelineError {
    fn from(e: NgramError) -> Self {
        PipelineError::Scorer(e.into())
    }
}

/// One scorer of a run, parsed from `kn:ORDER[:DISCOUNT[:FLOOR]]` or
/// `ext:PATH:ID`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScorerSpec {
    Kn { order: Order, discount: f64, floor: f64 },
    External { path: PathBuf, scorer_id: String },
}

impl ScorerSpec {
    pub fn scorer_id(&self) -> String {
        match self {
            ScorerSpec::Kn { order, discount, floor } => {
                let mut id = format!("kn{}", order.n());
                if *discount != DEFAULT_DISCOUNT || *floor != DEFAULT_FLOOR {
                    id.push_str(&format!("_d{discount}"));
                }
                if *floor != DEFAULT_FLOOR {
                    id.push_str(&format!("_a{floor}"));
                }
                id
            }
            ScorerSpec::External { scorer_id, .. } => scorer_id.clone(),
        }
    }
}

impl FromStr for ScorerSpec {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: &str| PipelineError::Config(format!("scorer {s:?}: {m}"));
        if let Some(rest) = s.strip_prefix("kn:") {
            let mut parts = rest.split(':');
            let order: usize = parts.next().unwrap_or("").parse().map_err(|_| bad("order must be 2 or 3"))?;
            let order = Order::try_from(order).map_err(|_| bad("order must be 2 or 3"))?;
            let discount = match parts.next() {
                Some(d) => d.parse().map_err(|_| bad("discount is not a number"))?,
                None => DEFAULT_DISCOUNT,
            };
            let floor = match parts.next() {
                Some(a) => a.parse().map_err(|_| bad("floor is not a number"))?,
                None => DEFAULT_FLOOR,
            };
            if parts.next().is_some() {
                return Err(bad("expected kn:ORDER[:DISCOUNT[:FLOOR]]"));
            }
            if !(discount > 0.0 && discount < 1.0) {
                return Err(bad("discount must lie in (0, 1)"));
            }
            if !(floor >= 0.0 && f64::is_finite(floor)) {
                return Err(bad("floor must be finite and non-negative"));
            }
            Ok(ScorerSpec::Kn { order, discount, floor })
        } else if let Some(rest) = s.strip_prefix("ext:") {
            let (path, id) = rest.rsplit_once(':').ok_or_else(|| bad("expected ext:PATH:ID"))?;
            if path.is_empty() || id.is_empty() {
                return Err(bad("expected ext:PATH:ID"));
            }
            Ok(ScorerSpec::External { path: path.into(), scorer_id: id.to_owned() })
        } else {
            Err(bad("expected kn:... or ext:..."))
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dataset: PathBuf,
    pub format: InputFormat,
    pub strict: bool,
    pub scorers: Vec<ScorerSpec>,
    pub out_dir: PathBuf,
    pub log_base: LogBase,
    /// Label for the caption set, e.g. a decoding method.
    pub data_tag: String,
    /// Scoring threads; 0 lets rayon decide.
    pub threads: usize,
    pub window: usize,
    pub variance_kind: VarianceKind,
    /// Directory for reusable n-gram count tables.
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(dataset: impl Into<PathBuf>, out_dir: impl Into<PathBuf>, scorers: Vec<ScorerSpec>) -> Self {
        let dataset = dataset.into();
        Self {
            format: InputFormat::from_path(&dataset),
            dataset,
            strict: false,
            scorers,
            out_dir: out_dir.into(),
            log_base: LogBase::Two,
            data_tag: "default".into(),
            threads: 0,
            window: DEFAULT_WINDOW,
            variance_kind: VarianceKind::Sample,
            cache_dir: None,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.scorers.is_empty() {
            return Err(PipelineError::Config("at least one scorer is required".into()));
        }
        let mut seen = HashSet::new();
        for s in &self.scorers {
            let id = s.scorer_id();
            if !seen.insert(id.clone()) {
                return Err(PipelineError::Config(format!("duplicate scorer_id {id:?}")));
            }
        }
        if self.window == 0 {
            return Err(PipelineError::Config("window must be positive".into()));
        }
        if self.data_tag.is_empty() || self.data_tag.contains(['\t', '\n']) {
            return Err(PipelineError::Config("data_tag must be non-empty and free of tabs/newlines".into()));
        }
        Ok(())
    }
}

/// Per-scorer part of [`RunSummary`].
#[derive(Debug, Clone, Serialize)]
pub struct ScorerSummary {
    pub scorer_id: String,
    pub n_records: usize,
    pub missing: Vec<(String, String)>,
    pub skipped_groups: Vec<SkippedGroup>,
    pub test: PairedTest,
}

/// Machine-readable companion of the TSV reports.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub data_tag: String,
    pub dataset_fingerprint: String,
    pub log_base: LogBase,
    pub n_images: usize,
    pub n_captions: usize,
    pub load: LoadReport,
    pub scorers: Vec<ScorerSummary>,
}

fn file_safe(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' }).collect()
}

fn create(path: &Path) -> Result<BufWriter<File>, PipelineError> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Count table for `dataset`, read from or written to `cache_dir` when set.
pub fn count_table(dataset: &Dataset, order: Order, cache_dir: Option<&Path>) -> Result<NgramCountTable, PipelineError> {
    let tag = dataset.fingerprint();
    let build = || NgramCountTable::build(dataset.captions().map(|c| c.tokens.as_slice()), order);
    let Some(dir) = cache_dir else {
        return Ok(build());
    };
    let path = dir.join(format!("{}-kn{}.bin", &tag[..16], order.n()));
    if path.exists() {
        let (table, cached_tag) = NgramCountTable::read_cache(BufReader::new(File::open(&path)?))?;
        if cached_tag == tag && crate::ngram::CountSource::order(&table) == order {
            log::info!("count table loaded from {}", path.display());
            return Ok(table);
        }
        log::warn!("stale count cache {}; rebuilding", path.display());
    }
    let table = build();
    std::fs::create_dir_all(dir)?;
    let mut w = create(&path)?;
    table.write_cache(&mut w, &tag)?;
    Ok(table)
}

/// Score `dataset` with one scorer, in `log_base`.
pub fn score(
    dataset: &Dataset,
    spec: &ScorerSpec,
    log_base: LogBase,
    cache_dir: Option<&Path>,
) -> Result<ScoredDataset, PipelineError> {
    match spec {
        ScorerSpec::Kn { order, discount, floor } => {
            if dataset.n_images() < 2 {
                return Err(ScorerError::EmptyTrainingPool(dataset.n_images()).into());
            }
            let table = count_table(dataset, *order, cache_dir)?;
            let config = NgramScorerConfig {
                order: *order,
                discount: *discount,
                floor: *floor,
                log_base,
                score_end: true,
                scorer_id: Some(spec.scorer_id()),
            };
            Ok(score_with_table(dataset, &table, &config)?)
        }
        ScorerSpec::External { path, scorer_id } => {
            let scored = import_external_surprisals(path, dataset)?;
            Ok(scored.with_scorer_id(scorer_id).to_log_base(log_base))
        }
    }
}

/// Per-image variances and the paired test for one scored dataset.
pub fn variance_and_test(
    scored: &ScoredDataset,
    dataset: &Dataset,
    kind: VarianceKind,
) -> Result<(GroupVariances, PairedTest), PipelineError> {
    let stats_err = |source| PipelineError::Stats { scorer_id: scored.scorer_id.clone(), source };
    let variances = group_variance(scored, dataset, kind).map_err(stats_err)?;
    let (_, h, m) = variances.paired();
    let test = paired_t_test(&h, &m).map_err(stats_err)?;
    Ok((variances, test))
}

/// Full pipeline over an already loaded dataset.
pub fn run_on_dataset(config: &RunConfig, dataset: &Dataset, load: LoadReport) -> Result<RunSummary, PipelineError> {
    config.validate()?;
    std::fs::create_dir_all(&config.out_dir)?;
    let out = |name: &str| config.out_dir.join(name);

    let lex_rows = per_source_stats(dataset, config.window)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| PipelineError::Config(format!("thread pool: {e}")))?;

    let mut scored_sets = Vec::with_capacity(config.scorers.len());
    for spec in &config.scorers {
        let scored = pool.install(|| score(dataset, spec, config.log_base, config.cache_dir.as_deref()))?;
        if !scored.is_complete() {
            log::warn!("{}: {} caption(s) unscored", scored.scorer_id, scored.missing.len());
        }
        scored_sets.push(scored);
    }

    let mut per_source = Vec::with_capacity(scored_sets.len());
    let mut tests = Vec::with_capacity(scored_sets.len());
    let mut summaries = Vec::with_capacity(scored_sets.len());
    for scored in &scored_sets {
        let (variances, test) = variance_and_test(scored, dataset, config.variance_kind)?;
        if test.n_pairs > dataset.n_images() {
            return Err(PipelineError::Invariant(format!("{} pairs from {} images", test.n_pairs, dataset.n_images())));
        }
        per_source.push(report::per_source_surprisal(scored));
        summaries.push(ScorerSummary {
            scorer_id: scored.scorer_id.clone(),
            n_records: scored.records.len(),
            missing: scored.missing.clone(),
            skipped_groups: variances.skipped.clone(),
            test: test.clone(),
        });
        tests.push(test);
    }

    report::write_lexstats(&lex_rows, dataset, create(&out("lexstats.tsv"))?)?;
    let per_model: Vec<(&str, &[report::SourceSurprisal])> =
        scored_sets.iter().zip(&per_source).map(|(s, rows)| (s.scorer_id.as_str(), rows.as_slice())).collect();
    report::write_per_model(&per_model, &config.data_tag, create(&out("per_model_surprisal.tsv"))?)?;
    let test_rows: Vec<(&str, &PairedTest)> =
        scored_sets.iter().zip(&tests).map(|(s, t)| (s.scorer_id.as_str(), t)).collect();
    report::write_variance_test(&test_rows, &config.data_tag, create(&out("variance_test.tsv"))?)?;
    for scored in &scored_sets {
        export_interchange(scored, create(&out(&format!("scores_{}.jsonl", file_safe(&scored.scorer_id))))?)?;
    }

    let summary = RunSummary {
        data_tag: config.data_tag.clone(),
        dataset_fingerprint: dataset.fingerprint(),
        log_base: config.log_base,
        n_images: dataset.n_images(),
        n_captions: dataset.n_captions(),
        load,
        scorers: summaries,
    };
    let mut w = create(&out("summary.json"))?;
    serde_json::to_writer_pretty(&mut w, &summary).map_err(std::io::Error::from)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    Ok(summary)
}

/// Load the configured dataset and run the full pipeline.
pub fn run(config: &RunConfig) -> Result<RunSummary, PipelineError> {
    config.validate()?;
    let (dataset, load) = load_dataset(&config.dataset, config.format, config.strict)?;
    log::info!("loaded {}: {load}", config.dataset.display());
    run_on_dataset(config, &dataset, load)
}
