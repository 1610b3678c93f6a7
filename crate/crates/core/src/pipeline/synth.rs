//! Synthetic caption sets with a known diversity gap.
//!
//! Both groups start from a small pool of shared templates. Each token of a
//! caption is then replaced, independently and with the group's substitution
//! rate, by a word drawn uniformly from the full vocabulary.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::PipelineError;
use crate::corpus::{Dataset, Group, TokenizedCaption, STRICT_CAPTIONS_PER_GROUP};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntheticSpec {
    pub n_images: usize,
    pub captions_per_group: usize,
    /// Templates shared by every image.
    pub n_templates: usize,
    pub vocab_size: usize,
    pub human_rate: f64,
    pub model_rate: f64,
    pub min_len: usize,
    pub max_len: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_images: 200,
            captions_per_group: STRICT_CAPTIONS_PER_GROUP,
            n_templates: 20,
            vocab_size: 1000,
            human_rate: 0.3,
            model_rate: 0.0,
            min_len: 8,
            max_len: 14,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let sizes = [
            ("n_images", self.n_images),
            ("captions_per_group", self.captions_per_group),
            ("n_templates", self.n_templates),
            ("vocab_size", self.vocab_size),
            ("min_len", self.min_len),
        ];
        if let Some((name, _)) = sizes.iter().find(|(_, v)| *v == 0) {
            return Err(PipelineError::Config(format!("synthetic {name} must be at least 1")));
        }
        if self.max_len < self.min_len {
            return Err(PipelineError::Config("synthetic max_len below min_len".into()));
        }
        for (name, rate) in [("human_rate", self.human_rate), ("model_rate", self.model_rate)] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(PipelineError::Config(format!("synthetic {name} {rate} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

fn word(i: usize) -> String {
    format!("w{i}")
}

/// Deterministic synthetic dataset; image ids `img00001…`, describers
/// `human_1…` and `model_1…`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset, PipelineError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let templates: Vec<Vec<usize>> = (0..spec.n_templates)
        .map(|_| {
            let len = rng.gen_range(spec.min_len..=spec.max_len);
            (0..len).map(|_| rng.gen_range(0..spec.vocab_size)).collect()
        })
        .collect();
    let width = spec.n_images.to_string().len().max(5);
    let mut captions = Vec::with_capacity(spec.n_images * spec.captions_per_group * 2);
    for img in 1..=spec.n_images {
        let image_id = format!("img{img:0width$}");
        for (group, rate) in [(Group::Human, spec.human_rate), (Group::Model, spec.model_rate)] {
            for k in 1..=spec.captions_per_group {
                let template = templates.choose(&mut rng).expect("template pool is non-empty");
                let tokens = template
                    .iter()
                    .map(|&w| if rng.gen_bool(rate) { rng.gen_range(0..spec.vocab_size) } else { w })
                    .map(word)
                    .collect();
                captions.push(TokenizedCaption {
                    image_id: image_id.clone(),
                    describer_id: format!("{group}_{k}"),
                    group,
                    tokens,
                });
            }
        }
    }
    let strict = spec.captions_per_group == STRICT_CAPTIONS_PER_GROUP;
    Dataset::from_captions(captions, strict).map_err(|e| PipelineError::Invariant(format!("synthetic dataset: {e}")))
}

/// Write a dataset as pre-tokenized JSONL, loadable with the JSONL reader.
pub fn write_dataset_jsonl<W: Write>(dataset: &Dataset, mut out: W) -> std::io::Result<()> {
    for caption in dataset.captions() {
        serde_json::to_writer(&mut out, caption)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
