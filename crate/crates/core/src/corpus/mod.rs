//! Caption ingestion: text cleaning, PTB-style tokenization and grouped
//! dataset loading.

mod clean;
mod load;
mod tokenize;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use clean::{clean_text, KEPT_PUNCTUATION};
pub use load::{load_dataset, load_dataset_from_str, DropReason, DroppedRecord, InputFormat, LoadReport};
pub use tokenize::tokenize;

/// Captions per group per image under the strict protocol.
pub const STRICT_CAPTIONS_PER_GROUP: usize = 5;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("no tokens remain after cleaning and tokenization")]
    EmptyAfterTokenization,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("image {image_id:?}: {message}")]
    ProtocolViolation { image_id: String, message: String },
    #[error("line {line}: duplicate caption key ({image_id:?}, {describer_id:?})")]
    DuplicateKey { line: usize, image_id: String, describer_id: String },
    #[error("dataset contains no captions")]
    EmptyDataset,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which population produced a caption.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Human,
    Model,
}

impl Group {
    pub const ALL: [Group; 2] = [Group::Human, Group::Model];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::Human => "human",
            Group::Model => "model",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "human" | "HUMAN" => Ok(Group::Human),
            "model" | "MODEL" => Ok(Group::Model),
            other => Err(format!("unknown group label {other:?} (expected human or model)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCaption {
    pub image_id: String,
    pub describer_id: String,
    pub group: Group,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedCaption {
    pub image_id: String,
    pub describer_id: String,
    pub group: Group,
    pub tokens: Vec<String>,
}

impl TokenizedCaption {
    /// Clean and tokenize a raw caption.
    pub fn from_raw(raw: RawCaption) -> Result<Self, CorpusError> {
        let tokens = tokenize(&clean_text(&raw.text))?;
        Ok(Self {
            image_id: raw.image_id,
            describer_id: raw.describer_id,
            group: raw.group,
            tokens,
        })
    }

    pub fn key(&self) -> (&str, &str) {
        (&self.image_id, &self.describer_id)
    }
}

/// All captions attached to one image, split by group and sorted by describer.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageCaptions {
    pub human: Vec<TokenizedCaption>,
    pub model: Vec<TokenizedCaption>,
}

impl ImageCaptions {
    pub fn group(&self, group: Group) -> &[TokenizedCaption] {
        match group {
            Group::Human => &self.human,
            Group::Model => &self.model,
        }
    }

    fn group_mut(&mut self, group: Group) -> &mut Vec<TokenizedCaption> {
        match group {
            Group::Human => &mut self.human,
            Group::Model => &mut self.model,
        }
    }

    /// Human captions then model captions, each sorted by describer id.
    pub fn iter(&self) -> impl Iterator<Item = &TokenizedCaption> {
        self.human.iter().chain(self.model.iter())
    }

    pub fn len(&self) -> usize {
        self.human.len() + self.model.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCounts {
    pub human: usize,
    pub model: usize,
}

/// Immutable grouped caption collection keyed by image id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    images: BTreeMap<String, ImageCaptions>,
    counts: GroupCounts,
}

impl Dataset {
    /// Build a dataset from tokenized captions, validating keys and groups.
    ///
    /// With `strict`, every image must carry exactly five captions per group.
    pub fn from_captions(
        captions: impl IntoIterator<Item = TokenizedCaption>,
        strict: bool,
    ) -> Result<Self, CorpusError> {
        let mut images: BTreeMap<String, ImageCaptions> = BTreeMap::new();
        let mut counts = GroupCounts::default();
        for (idx, caption) in captions.into_iter().enumerate() {
            let entry = images.entry(caption.image_id.clone()).or_default();
            if entry.iter().any(|c| c.describer_id == caption.describer_id) {
                return Err(CorpusError::DuplicateKey {
                    line: idx + 1,
                    image_id: caption.image_id,
                    describer_id: caption.describer_id,
                });
            }
            match caption.group {
                Group::Human => counts.human += 1,
                Group::Model => counts.model += 1,
            }
            entry.group_mut(caption.group).push(caption);
        }
        if images.is_empty() {
            return Err(CorpusError::EmptyDataset);
        }
        for img in images.values_mut() {
            img.human.sort_by(|a, b| a.describer_id.cmp(&b.describer_id));
            img.model.sort_by(|a, b| a.describer_id.cmp(&b.describer_id));
        }
        let dataset = Self { images, counts };
        dataset.validate(strict)?;
        Ok(dataset)
    }

    fn validate(&self, strict: bool) -> Result<(), CorpusError> {
        let present: Vec<Group> = Group::ALL
            .into_iter()
            .filter(|g| match g {
                Group::Human => self.counts.human > 0,
                Group::Model => self.counts.model > 0,
            })
            .collect();
        for (image_id, img) in &self.images {
            for &group in &present {
                let n = img.group(group).len();
                if strict && n != STRICT_CAPTIONS_PER_GROUP {
                    return Err(CorpusError::ProtocolViolation {
                        image_id: image_id.clone(),
                        message: format!("expected {STRICT_CAPTIONS_PER_GROUP} {group} captions, found {n}"),
                    });
                }
                if n == 0 {
                    return Err(CorpusError::ProtocolViolation {
                        image_id: image_id.clone(),
                        message: format!("no {group} captions"),
                    });
                }
            }
            if strict && present.len() != 2 {
                return Err(CorpusError::ProtocolViolation {
                    image_id: image_id.clone(),
                    message: "strict mode needs both human and model captions".into(),
                });
            }
        }
        Ok(())
    }

    pub fn images(&self) -> &BTreeMap<String, ImageCaptions> {
        &self.images
    }

    pub fn image(&self, image_id: &str) -> Option<&ImageCaptions> {
        self.images.get(image_id)
    }

    pub fn n_images(&self) -> usize {
        self.images.len()
    }

    pub fn n_captions(&self) -> usize {
        self.counts.human + self.counts.model
    }

    pub fn counts(&self) -> GroupCounts {
        self.counts
    }

    /// Every caption in (image_id, group, describer_id) order.
    pub fn captions(&self) -> impl Iterator<Item = &TokenizedCaption> {
        self.images.values().flat_map(ImageCaptions::iter)
    }

    /// Look up one caption by key.
    pub fn caption(&self, image_id: &str, describer_id: &str) -> Option<&TokenizedCaption> {
        self.images.get(image_id)?.iter().find(|c| c.describer_id == describer_id)
    }

    /// Hex SHA-256 over the canonical JSON serialization.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("dataset serializes");
        hex::encode(Sha256::digest(&json))
    }
}
