use rayon::prelude::*;

use super::{ScoredDataset, ScorerError, SurprisalRecord};
use crate::corpus::{Dataset, ImageCaptions};
use crate::ngram::{
    caption_surprisal, CountOverlay, KneserNeyLm, NgramCountTable, NgramError, Order, DEFAULT_DISCOUNT, DEFAULT_FLOOR,
    EOS_TOKEN,
};
use crate::scalar::LogBase;

#[derive(Debug, Clone, PartialEq)]
pub struct NgramScorerConfig {
    pub order: Order,
    pub discount: f64,
    pub floor: f64,
    pub log_base: LogBase,
    /// Score the closing `</s>` as part of each caption.
    pub score_end: bool,
    /// Defaults to `kn2` / `kn3`.
    pub scorer_id: Option<String>,
}

impl NgramScorerConfig {
    pub fn new(order: Order) -> Self {
        Self {
            order,
            discount: DEFAULT_DISCOUNT,
            floor: DEFAULT_FLOOR,
            log_base: LogBase::Two,
            score_end: true,
            scorer_id: None,
        }
    }

    pub fn scorer_id(&self) -> String {
        self.scorer_id.clone().unwrap_or_else(|| format!("kn{}", self.order.n()))
    }
}

fn score_image(
    table: &NgramCountTable,
    image: &ImageCaptions,
    config: &NgramScorerConfig,
    scorer_id: &str,
) -> Result<Vec<SurprisalRecord>, ScorerError> {
    let overlay = CountOverlay::new(table, image.iter().map(|c| c.tokens.as_slice()))?;
    let lm = KneserNeyLm::new(&overlay, config.discount, config.floor)?;
    image
        .iter()
        .map(|caption| {
            let score = caption_surprisal(&lm, &caption.tokens, config.log_base, config.score_end)
                .map_err(|e| match e {
                    NgramError::EmptyModel => ScorerError::EmptyTrainingPool(0),
                    other => other.into(),
                })?;
            if score.per_token.iter().any(|v| !v.is_finite()) {
                return Err(ScorerError::NonFiniteSurprisal {
                    image_id: caption.image_id.clone(),
                    describer_id: caption.describer_id.clone(),
                });
            }
            let mut tokens = caption.tokens.clone();
            if config.score_end {
                tokens.push(EOS_TOKEN.to_owned());
            }
            Ok(SurprisalRecord {
                image_id: caption.image_id.clone(),
                describer_id: caption.describer_id.clone(),
                group: caption.group,
                scorer_id: scorer_id.to_owned(),
                tokens,
                per_token_surprisal: score.per_token,
                mean_surprisal: score.mean,
            })
        })
        .collect()
}

/// Score every caption under a Kneser–Ney model that never saw any caption
/// of the caption's own image.
///
/// One count table is built over the whole dataset; each image is scored
/// through a [`CountOverlay`] subtracting that image's captions. Images are
/// processed in parallel on the current rayon pool.
pub fn score_dataset_ngram(dataset: &Dataset, config: &NgramScorerConfig) -> Result<ScoredDataset, ScorerError> {
    if dataset.n_images() < 2 {
        return Err(ScorerError::EmptyTrainingPool(dataset.n_images()));
    }
    let table = NgramCountTable::build(dataset.captions().map(|c| c.tokens.as_slice()), config.order);
    score_with_table(dataset, &table, config)
}

/// Like [`score_dataset_ngram`] but with a prebuilt (e.g. cached) table,
/// which must have been counted over exactly this dataset.
pub fn score_with_table(
    dataset: &Dataset,
    table: &NgramCountTable,
    config: &NgramScorerConfig,
) -> Result<ScoredDataset, ScorerError> {
    use crate::ngram::CountSource;
    if dataset.n_images() < 2 {
        return Err(ScorerError::EmptyTrainingPool(dataset.n_images()));
    }
    if table.order() != config.order {
        return Err(NgramError::InvalidOrder(table.order().n()).into());
    }
    let scorer_id = config.scorer_id();
    let images: Vec<&ImageCaptions> = dataset.images().values().collect();
    let per_image = images
        .par_iter()
        .map(|image| score_image(table, image, config, &scorer_id))
        .collect::<Result<Vec<_>, _>>()?;
    let records = per_image.into_iter().flatten().collect();
    Ok(ScoredDataset::finish(scorer_id, dataset, config.log_base, records, Vec::new()))
}
