use serde::Serialize;

use super::StatsError;
use crate::corpus::{Dataset, Group};
use crate::scalar::Real;
use crate::scorers::ScoredDataset;

/// Denominator of a variance estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum VarianceKind {
    /// n − 1
    #[default]
    Sample,
    /// n
    Population,
}

/// Running mean and sum of squared deviations (Welford).
#[derive(Debug, Clone, Copy)]
pub struct Welford<R> {
    n: u64,
    mean: R,
    m2: R,
}

impl<R: Real> Default for Welford<R> {
    fn default() -> Self {
        Self { n: 0, mean: R::zero(), m2: R::zero() }
    }
}

impl<R: Real> Welford<R> {
    pub fn push(&mut self, x: R) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean = self.mean + delta / R::from_count(self.n);
        self.m2 = self.m2 + delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> Option<R> {
        (self.n > 0).then_some(self.mean)
    }

    pub fn variance(&self, kind: VarianceKind) -> Option<R> {
        let denom = match kind {
            VarianceKind::Sample if self.n >= 2 => self.n - 1,
            VarianceKind::Population if self.n >= 1 => self.n,
            _ => return None,
        };
        Some((self.m2 / R::from_count(denom)).max(R::zero()))
    }
}

impl<R: Real> FromIterator<R> for Welford<R> {
    fn from_iter<I: IntoIterator<Item = R>>(iter: I) -> Self {
        let mut w = Self::default();
        iter.into_iter().for_each(|x| w.push(x));
        w
    }
}

/// Variance of `values`, or `None` if there are too few of them.
pub fn variance<R: Real>(values: &[R], kind: VarianceKind) -> Option<R> {
    values.iter().copied().collect::<Welford<R>>().variance(kind)
}

/// Mean and sample standard deviation.
pub fn mean_sd<R: Real>(values: &[R]) -> (R, R) {
    let w: Welford<R> = values.iter().copied().collect();
    let mean = w.mean().unwrap_or_else(R::nan);
    let sd = w.variance(VarianceKind::Sample).map_or_else(R::nan, R::sqrt);
    (mean, sd)
}

/// Spread of caption mean surprisals within one (image, group).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceRecord {
    pub image_id: String,
    pub group: Group,
    pub scorer_id: String,
    pub n_captions: usize,
    pub variance: f64,
}

/// An (image, group) left out of [`group_variance`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedGroup {
    pub image_id: String,
    pub group: Group,
    pub n_scored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupVariances {
    pub scorer_id: String,
    /// Sorted by (image_id, group).
    pub records: Vec<VarianceRecord>,
    /// Groups with fewer than two scored captions.
    pub skipped: Vec<SkippedGroup>,
}

impl GroupVariances {
    /// Per-image (human, model) variance pairs for images that have both.
    pub fn paired(&self) -> (Vec<String>, Vec<f64>, Vec<f64>) {
        let mut ids = Vec::new();
        let mut h = Vec::new();
        let mut m = Vec::new();
        for pair in self.records.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a.image_id == b.image_id && a.group == Group::Human && b.group == Group::Model {
                ids.push(a.image_id.clone());
                h.push(a.variance);
                m.push(b.variance);
            }
        }
        (ids, h, m)
    }
}

/// Per (image, group) variance of caption mean surprisal.
///
/// Groups with fewer than two scored captions are skipped and listed in the
/// result; groups with no captions in the dataset are ignored.
pub fn group_variance(scored: &ScoredDataset, dataset: &Dataset, kind: VarianceKind) -> Result<GroupVariances, StatsError> {
    if scored.fingerprint != dataset.fingerprint() {
        return Err(StatsError::DatasetMismatch);
    }
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (image_id, image) in dataset.images() {
        for group in Group::ALL {
            let captions = image.group(group);
            if captions.is_empty() {
                continue;
            }
            let means: Vec<f64> = captions
                .iter()
                .filter_map(|c| scored.get(&c.image_id, &c.describer_id))
                .map(|r| r.mean_surprisal)
                .collect();
            match variance(&means, kind) {
                Some(v) if means.len() >= 2 => records.push(VarianceRecord {
                    image_id: image_id.clone(),
                    group,
                    scorer_id: scored.scorer_id.clone(),
                    n_captions: means.len(),
                    variance: v,
                }),
                _ => {
                    log::warn!("image {image_id} group {group}: {} scored caption(s), variance undefined", means.len());
                    skipped.push(SkippedGroup { image_id: image_id.clone(), group, n_scored: means.len() })
                }
            }
        }
    }
    Ok(GroupVariances { scorer_id: scored.scorer_id.clone(), records, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_pass(xs: &[f64]) -> f64 {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
    }

    #[test]
    fn textbook_values() {
        assert_eq!(variance(&[1.0, 1.0, 1.0, 1.0, 1.0], VarianceKind::Sample), Some(0.0));
        assert_eq!(variance(&[1.0, 2.0, 3.0, 4.0, 5.0], VarianceKind::Sample), Some(2.5));
        assert_eq!(variance(&[1.0, 2.0, 3.0, 4.0, 5.0], VarianceKind::Population), Some(2.0));
        assert_eq!(variance(&[3.0_f64], VarianceKind::Sample), None);
        assert_eq!(variance(&[3.0_f64], VarianceKind::Population), Some(0.0));
        assert_eq!(variance::<f32>(&[1.0, 3.0], VarianceKind::Sample), Some(2.0));
    }

    proptest::proptest! {
        #[test]
        fn matches_two_pass(xs in proptest::collection::vec(-50.0f64..50.0, 5)) {
            let v = variance(&xs, VarianceKind::Sample).unwrap();
            proptest::prop_assert!((v - two_pass(&xs)).abs() < 1e-12);
            proptest::prop_assert!(v >= 0.0);
        }
    }
}
