//! Small sequence classifier with hand-written backpropagation.

mod classifier;
pub mod encoder;
mod params;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use classifier::{softmax, Classifier, ForwardPass, NUM_CLASSES, POSITION_EMBEDDINGS, WORD_EMBEDDINGS};
pub use encoder::{Encoder, EncoderDims, EncoderPass};
pub use params::Params;

use crate::registry::RegistryError;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid model file: {0}")]
    Format(String),
    #[error("invalid model config: {0}")]
    Config(String),
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

impl ModelError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub encoder: String,
    pub vocab_size: usize,
    pub dim: usize,
    pub hidden: usize,
    pub max_len: usize,
    pub init_std: f64,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.vocab_size == 0 || self.dim == 0 || self.hidden == 0 {
            return Err(ModelError::Config("sizes must be positive".into()));
        }
        if self.max_len < 3 {
            return Err(ModelError::Config("max_len must leave room for one token".into()));
        }
        if !(self.init_std > 0.0 && self.init_std.is_finite()) {
            return Err(ModelError::Config("init_std must be positive".into()));
        }
        Ok(())
    }
}
