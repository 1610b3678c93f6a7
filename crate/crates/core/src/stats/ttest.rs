use serde::Serialize;

use super::special::student_t_sf;
use super::variance::{mean_sd, VarianceKind, Welford};
use super::StatsError;
use crate::scalar::Real;

/// Raised alongside a result whose differences have no spread.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestFlag {
    ZeroVarianceOfDifferences,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedTestResult<R> {
    pub n_pairs: usize,
    pub mean_h: R,
    pub sd_h: R,
    pub mean_m: R,
    pub sd_m: R,
    /// Mean of h − m.
    pub mean_diff: R,
    pub t_value: R,
    pub df: u64,
    pub p_two_sided: R,
    pub cohens_dz: R,
    pub flag: Option<TestFlag>,
}

/// Paired two-sided t-test of `h` against `m`, matched by index.
///
/// When every difference is equal the statistic is degenerate: identical
/// samples give t = 0, p = 1, dz = 0; a constant non-zero shift gives
/// t = ±∞, p = 0, dz = ∞. Both carry [`TestFlag::ZeroVarianceOfDifferences`].
pub fn paired_t_test<R: Real>(h: &[R], m: &[R]) -> Result<PairedTestResult<R>, StatsError> {
    if h.len() != m.len() {
        return Err(StatsError::LengthMismatch { h: h.len(), m: m.len() });
    }
    let n = h.len();
    if n < 2 {
        return Err(StatsError::TooFewPairs(n));
    }
    let (mean_h, sd_h) = mean_sd(h);
    let (mean_m, sd_m) = mean_sd(m);
    let diffs: Welford<R> = h.iter().zip(m).map(|(&a, &b)| a - b).collect();
    let mean_diff = diffs.mean().unwrap_or_else(R::zero);
    let first = h[0] - m[0];
    let constant = h.iter().zip(m).all(|(&a, &b)| a - b == first);
    let df = (n - 1) as u64;
    let (t_value, p_two_sided, cohens_dz, flag) = if constant {
        log::warn!("all paired differences equal ({first:?}); t-test degenerate");
        let flag = Some(TestFlag::ZeroVarianceOfDifferences);
        if first == R::zero() {
            (R::zero(), R::one(), R::zero(), flag)
        } else {
            (first.signum() * R::infinity(), R::zero(), R::infinity(), flag)
        }
    } else {
        let sd_d = diffs.variance(VarianceKind::Sample).map_or_else(R::zero, R::sqrt);
        let sqrt_n = R::from_count(n as u64).sqrt();
        let t = mean_diff / (sd_d / sqrt_n);
        let p = (R::lit(2.0) * student_t_sf(t.abs(), df)).min(R::one());
        (t, p, mean_diff.abs() / sd_d, None)
    };
    Ok(PairedTestResult {
        n_pairs: n,
        mean_h,
        sd_h,
        mean_m,
        sd_m,
        mean_diff,
        t_value,
        df,
        p_two_sided,
        cohens_dz,
        flag,
    })
}

/// Significance stars: `***` p < .001, `**` < .01, `*` < .05, else `ns`.
pub fn p_stars<R: Real>(p: R) -> &'static str {
    if p < R::lit(0.001) {
        "***"
    } else if p < R::lit(0.01) {
        "**"
    } else if p < R::lit(0.05) {
        "*"
    } else {
        "ns"
    }
}
