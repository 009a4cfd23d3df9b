use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::timeline::{MetricsTimeline, TimelinePoint};
use super::TrainError;
use crate::model::{Classifier, ModelConfig, Params};
use crate::text::{Encoding, Tokenizer};
use crate::Label;

pub const CONFIG_FILE: &str = "config.json";
pub const WEIGHTS_FILE: &str = "model.safetensors";
pub const TIMELINE_FILE: &str = "timeline.csv";
pub const CURVES_FILE: &str = "curves.svg";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactMetadata {
    pub format_version: u32,
    pub dataset: String,
    pub base_model_id: String,
    pub model: ModelConfig,
    pub train_config: TrainConfig,
    pub added_tokens: usize,
    pub train_samples: usize,
    pub eval_samples: usize,
    pub final_eval: Option<TimelinePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    /// Probability of the burnout class.
    pub score: f64,
}

/// The decision rule: burnout iff the positive-class probability is at
/// least one half (ties go to burnout).
pub fn label_for_score(score: f64) -> Label {
    Label::from_bool(score >= 0.5)
}

/// A trained classifier together with its tokenizer and provenance.
#[derive(Debug, Clone)]
pub struct ClassifierArtifact {
    pub metadata: ArtifactMetadata,
    pub tokenizer: Tokenizer,
    pub model: Classifier,
    pub timeline: MetricsTimeline,
}

impl ClassifierArtifact {
    pub fn encode(&self, text: &str) -> Encoding {
        self.tokenizer.encode(text, self.model.config().max_len)
    }

    pub fn predict(&self, text: &str) -> Result<Prediction, TrainError> {
        if text.trim().is_empty() {
            return Err(TrainError::EmptyText);
        }
        let enc = self.encode(text);
        let score = self.model.probabilities(&enc.ids)[1];
        Ok(Prediction {
            label: label_for_score(score),
            score,
        })
    }

    pub fn predict_batch<S: AsRef<str>>(&self, texts: &[S]) -> Result<Vec<Prediction>, TrainError> {
        texts
            .iter()
            .enumerate()
            .map(|(index, t)| {
                self.predict(t.as_ref()).map_err(|e| TrainError::Batch {
                    index,
                    source: Box::new(e),
                })
            })
            .collect()
    }

    pub fn save(&self, dir: &Path) -> Result<(), TrainError> {
        fs::create_dir_all(dir).map_err(|e| TrainError::io(dir, e))?;
        let config = dir.join(CONFIG_FILE);
        let json = serde_json::to_string_pretty(&self.metadata).expect("metadata serializes");
        fs::write(&config, json + "\n").map_err(|e| TrainError::io(&config, e))?;
        self.tokenizer.save(dir)?;
        self.model.params().write_safetensors(&dir.join(WEIGHTS_FILE))?;
        let timeline = dir.join(TIMELINE_FILE);
        let file = fs::File::create(&timeline).map_err(|e| TrainError::io(&timeline, e))?;
        self.timeline
            .write_csv(file)
            .map_err(|e| TrainError::Format(format!("{}: {e}", timeline.display())))?;
        let curves = dir.join(CURVES_FILE);
        let svg = self
            .timeline
            .render_svg(&format!("{} ({})", self.metadata.dataset, self.metadata.base_model_id))?;
        fs::write(&curves, svg).map_err(|e| TrainError::io(&curves, e))?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self, TrainError> {
        let config = dir.join(CONFIG_FILE);
        let text = fs::read_to_string(&config).map_err(|e| TrainError::io(&config, e))?;
        let metadata: ArtifactMetadata = serde_json::from_str(&text)
            .map_err(|e| TrainError::Format(format!("{}: {e}", config.display())))?;
        if metadata.format_version != FORMAT_VERSION {
            return Err(TrainError::Format(format!(
                "{}: unsupported format version {}",
                config.display(),
                metadata.format_version
            )));
        }
        let tokenizer = Tokenizer::load(dir)?;
        if tokenizer.vocab_size() != metadata.model.vocab_size {
            return Err(TrainError::Format(format!(
                "tokenizer has {} tokens but the model expects {}",
                tokenizer.vocab_size(),
                metadata.model.vocab_size
            )));
        }
        let params = Params::read_safetensors(&dir.join(WEIGHTS_FILE))?;
        let model = Classifier::from_parts(metadata.model.clone(), params)?;
        let timeline_path = dir.join(TIMELINE_FILE);
        let timeline = if timeline_path.exists() {
            MetricsTimeline::read_csv(&timeline_path)?
        } else {
            MetricsTimeline::new()
        };
        Ok(Self {
            metadata,
            tokenizer,
            model,
            timeline,
        })
    }

    /// Wraps a model with freshly built metadata. `counts` are the train
    /// and eval sample counts.
    pub fn new(
        dataset: &str,
        config: &TrainConfig,
        tokenizer: Tokenizer,
        model: Classifier,
        timeline: MetricsTimeline,
        counts: (usize, usize),
    ) -> Self {
        let added_tokens = tokenizer.added_tokens().len();
        Self {
            metadata: ArtifactMetadata {
                format_version: FORMAT_VERSION,
                dataset: dataset.to_string(),
                base_model_id: config.base_model_id.clone(),
                model: model.config().clone(),
                train_config: config.clone(),
                added_tokens,
                train_samples: counts.0,
                eval_samples: counts.1,
                final_eval: timeline.last().copied(),
            },
            tokenizer,
            model,
            timeline,
        }
    }
}
