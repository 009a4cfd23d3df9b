use serde::{Deserialize, Serialize};

use super::TrainError;

/// Optimizer and schedule settings. None of these are tuned per dataset;
/// they are the library defaults and are written into every artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSettings {
    pub name: String,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub max_grad_norm: f64,
    pub schedule: String,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            name: "adamw".into(),
            learning_rate: 0.02,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            max_grad_norm: 1.0,
            schedule: "linear-warmup-decay".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: u32,
    pub train_batch_size: usize,
    pub eval_batch_size: usize,
    pub warmup_steps: usize,
    pub weight_decay: f64,
    pub rng_seed: u64,
    pub base_model_id: String,
    /// Lower bound on the number of timeline points per run.
    pub min_eval_points: usize,
    pub optimizer: OptimizerSettings,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 3,
            train_batch_size: 16,
            eval_batch_size: 64,
            warmup_steps: 500,
            weight_decay: 0.01,
            rng_seed: 0,
            base_model_id: super::DEFAULT_BASE_MODEL.into(),
            min_eval_points: 10,
            optimizer: OptimizerSettings::default(),
        }
    }
}

pub const ALLOWED_EPOCHS: [u32; 3] = [2, 3, 4];

impl TrainConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            rng_seed: seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::Config(m.to_string()));
        if !ALLOWED_EPOCHS.contains(&self.epochs) {
            return Err(TrainError::Config(format!(
                "epochs must be one of {ALLOWED_EPOCHS:?}, got {}",
                self.epochs
            )));
        }
        if self.train_batch_size == 0 || self.eval_batch_size == 0 {
            return bad("batch sizes must be positive");
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return bad("weight_decay must be a non-negative number");
        }
        let o = &self.optimizer;
        if !(o.learning_rate > 0.0 && o.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(0.0..1.0).contains(&o.beta1) || !(0.0..1.0).contains(&o.beta2) {
            return bad("betas must lie in [0, 1)");
        }
        if o.name != "adamw" {
            return Err(TrainError::Config(format!("unsupported optimizer '{}'", o.name)));
        }
        if o.schedule != "linear-warmup-decay" {
            return Err(TrainError::Config(format!("unsupported schedule '{}'", o.schedule)));
        }
        Ok(())
    }
}
