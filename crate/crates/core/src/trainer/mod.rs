//! Fine-tuning the sequence classifier on a labelled dataset.

mod artifact;
mod config;
mod fit;
mod optim;
mod timeline;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use artifact::{
    label_for_score, ArtifactMetadata, ClassifierArtifact, Prediction, CONFIG_FILE, CURVES_FILE, TIMELINE_FILE,
    WEIGHTS_FILE,
};
pub use config::{OptimizerSettings, TrainConfig, ALLOWED_EPOCHS};
pub use fit::{eval_interval, extend_vocabulary, fine_tune, load_base};
pub use optim::{clip_grad_norm, learning_rate, AdamW};
pub use timeline::{MetricsTimeline, TimelinePoint};

use crate::model::{ModelConfig, ModelError};
use crate::registry::{Registry, RegistryError};
use crate::text::TextError;
use crate::Label;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("training set is empty")]
    EmptyTrainSet,
    #[error("evaluation set is empty")]
    EmptyEvalSet,
    #[error("training set contains only label {present}; need both classes")]
    SingleClass { present: Label },
    #[error("non-finite loss at step {step} (epoch {epoch}): loss {loss}, gradient norm {grad_norm}")]
    NonFinite {
        step: usize,
        epoch: usize,
        loss: f64,
        grad_norm: f64,
    },
    #[error("text is empty")]
    EmptyText,
    #[error("item {index}: {source}")]
    Batch {
        index: usize,
        #[source]
        source: Box<TrainError>,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

impl TrainError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Architecture and size of a starting model. There are no pretrained
/// weights: a base model is a vocabulary plus a seeded initialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseModel {
    pub encoder: String,
    pub dim: usize,
    pub hidden: usize,
    pub max_len: usize,
    pub init_std: f64,
}

impl BaseModel {
    pub fn model_config(&self, vocab_size: usize) -> ModelConfig {
        ModelConfig {
            encoder: self.encoder.clone(),
            vocab_size,
            dim: self.dim,
            hidden: self.hidden,
            max_len: self.max_len,
            init_std: self.init_std,
        }
    }
}

pub const DEFAULT_BASE_MODEL: &str = "tiny-german-cased";

pub fn base_models() -> Registry<BaseModel> {
    let mut reg = Registry::new("base model");
    reg.register(
        DEFAULT_BASE_MODEL,
        BaseModel {
            encoder: "self-attention".into(),
            dim: 32,
            hidden: 32,
            max_len: 64,
            init_std: 0.1,
        },
    )
    .expect("unique");
    reg.register(
        "tiny-german-cased-bow",
        BaseModel {
            encoder: "mean-pool".into(),
            dim: 32,
            hidden: 32,
            max_len: 64,
            init_std: 0.1,
        },
    )
    .expect("unique");
    reg
}

/// Mean and spread of a metric over repeated seeded runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub runs: usize,
    pub mean: f64,
    /// Sample standard deviation (0 for a single run).
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Spread {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self {
            runs: values.len(),
            mean,
            std,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

impl std::fmt::Display for Spread {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.3} ± {:.3} (n={})", self.mean, self.std, self.runs)
    }
}
