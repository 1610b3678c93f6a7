//! Per-image surprisal variance and the paired human-versus-model test.

mod special;
mod ttest;
mod variance;

use thiserror::Error;

pub use special::{ln_gamma, reg_inc_beta, student_t_sf};
pub use ttest::{p_stars, paired_t_test, PairedTestResult, TestFlag};
pub use variance::{group_variance, mean_sd, variance, GroupVariances, SkippedGroup, VarianceKind, VarianceRecord, Welford};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("paired samples differ in length ({h} vs {m})")]
    LengthMismatch { h: usize, m: usize },
    #[error("paired test needs at least 2 pairs, got {0}")]
    TooFewPairs(usize),
    #[error("scored records were produced for a different dataset")]
    DatasetMismatch,
}
