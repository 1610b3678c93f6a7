//! Fixed-layout TSV reports.
//!
//! Lexical ratios and lengths use two decimals; surprisal statistics use
//! three; t and dz use two, df is an integer.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::corpus::Dataset;
use crate::lexstats::{LexReport, Source};
use crate::scorers::ScoredDataset;
use crate::stats::{mean_sd, p_stars, variance, GroupVariances, VarianceKind};
use crate::PairedTest;

pub const LEXSTATS_HEADER: [&str; 8] = ["source", "asl", "sdsl", "n_types", "ttr1", "ttr2", "n_captions", "n_tokens"];
pub const PER_MODEL_HEADER: [&str; 7] = ["scorer", "data_tag", "source", "n_captions", "mean_surprisal", "variance", "sd"];
pub const VARIANCE_TEST_HEADER: [&str; 10] =
    ["scorer", "data_tag", "mean_h", "sd_h", "mean_m", "sd_m", "t", "df", "p_stars", "dz"];
pub const GROUP_VARIANCE_HEADER: [&str; 5] = ["image_id", "group", "scorer", "n_captions", "variance"];

fn tsv<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().delimiter(b'\t').quote_style(csv::QuoteStyle::Never).from_writer(out)
}

fn csv_io(e: csv::Error) -> std::io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => std::io::Error::other(format!("{other:?}")),
    }
}

/// `# images=N captions=M` followed by one row per source.
pub fn write_lexstats<W: Write>(rows: &[(Source, LexReport)], dataset: &Dataset, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# images={} captions={}", dataset.n_images(), dataset.n_captions())?;
    let mut w = tsv(out);
    w.write_record(LEXSTATS_HEADER).map_err(csv_io)?;
    for (source, r) in rows {
        w.write_record([
            source.label().to_owned(),
            format!("{:.2}", r.asl),
            format!("{:.2}", r.sdsl),
            r.n_types.to_string(),
            format!("{:.2}", r.ttr1),
            format!("{:.2}", r.ttr2),
            r.n_captions.to_string(),
            r.n_tokens.to_string(),
        ])
        .map_err(csv_io)?;
    }
    w.flush()
}

/// Across-image spread of caption mean surprisal for one source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceSurprisal {
    pub source: Source,
    pub n_captions: usize,
    pub mean_surprisal: f64,
    /// Sample variance of caption means; NaN below two captions.
    pub variance: f64,
    pub sd: f64,
}

/// One row per describer, then pooled rows per group.
pub fn per_source_surprisal(scored: &ScoredDataset) -> Vec<SourceSurprisal> {
    let mut by_source: BTreeMap<Source, Vec<f64>> = BTreeMap::new();
    for r in &scored.records {
        by_source.entry(Source::Describer(r.describer_id.clone())).or_default().push(r.mean_surprisal);
        by_source.entry(Source::Pooled(r.group)).or_default().push(r.mean_surprisal);
    }
    by_source
        .into_iter()
        .map(|(source, means)| {
            let (mean_surprisal, _) = mean_sd(&means);
            let var = variance(&means, VarianceKind::Sample).unwrap_or(f64::NAN);
            SourceSurprisal { source, n_captions: means.len(), mean_surprisal, variance: var, sd: var.sqrt() }
        })
        .collect()
}

pub fn write_per_model<W: Write>(scorers: &[(&str, &[SourceSurprisal])], data_tag: &str, out: W) -> std::io::Result<()> {
    let mut w = tsv(out);
    w.write_record(PER_MODEL_HEADER).map_err(csv_io)?;
    for (scorer, rows) in scorers {
        for r in *rows {
            w.write_record([
                scorer.to_string(),
                data_tag.to_owned(),
                r.source.label().to_owned(),
                r.n_captions.to_string(),
                format!("{:.3}", r.mean_surprisal),
                format!("{:.3}", r.variance),
                format!("{:.3}", r.sd),
            ])
            .map_err(csv_io)?;
        }
    }
    w.flush()
}

pub fn write_variance_test<W: Write>(rows: &[(&str, &PairedTest)], data_tag: &str, out: W) -> std::io::Result<()> {
    let mut w = tsv(out);
    w.write_record(VARIANCE_TEST_HEADER).map_err(csv_io)?;
    for (scorer, t) in rows {
        w.write_record([
            scorer.to_string(),
            data_tag.to_owned(),
            format!("{:.3}", t.mean_h),
            format!("{:.3}", t.sd_h),
            format!("{:.3}", t.mean_m),
            format!("{:.3}", t.sd_m),
            format!("{:.2}", t.t_value),
            t.df.to_string(),
            p_stars(t.p_two_sided).to_owned(),
            format!("{:.2}", t.cohens_dz),
        ])
        .map_err(csv_io)?;
    }
    w.flush()
}

pub fn write_group_variance<W: Write>(variances: &GroupVariances, out: W) -> std::io::Result<()> {
    let mut w = tsv(out);
    w.write_record(GROUP_VARIANCE_HEADER).map_err(csv_io)?;
    for r in &variances.records {
        w.write_record([
            r.image_id.clone(),
            r.group.to_string(),
            r.scorer_id.clone(),
            r.n_captions.to_string(),
            format!("{:.3}", r.variance),
        ])
        .map_err(csv_io)?;
    }
    w.flush()
}
