use std::sync::Arc;

use ndarray::{s, Array1, Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::encoder::{self, Encoder, EncoderDims, EncoderPass};
use super::params::{normal_matrix, Params};
use super::{ModelConfig, ModelError};
use crate::Label;

pub const WORD_EMBEDDINGS: &str = "embeddings.word";
pub const POSITION_EMBEDDINGS: &str = "embeddings.position";
const HEAD_W: &str = "classifier.weight";
const HEAD_B: &str = "classifier.bias";

pub const NUM_CLASSES: usize = 2;

/// Token embeddings + encoder + linear two-class head.
#[derive(Debug, Clone)]
pub struct Classifier {
    config: ModelConfig,
    params: Params,
    encoder: Arc<dyn Encoder>,
}

#[derive(Debug)]
pub struct ForwardPass {
    pub encoded: EncoderPass,
    pub logits: Array1<f64>,
    pub probs: Array1<f64>,
}

impl ForwardPass {
    pub fn predicted(&self) -> Label {
        Label::from_bool(self.probs[1] >= 0.5)
    }
}

pub fn softmax(logits: &Array1<f64>) -> Array1<f64> {
    let max = logits.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let e = logits.mapv(|v| (v - max).exp());
    let sum = e.sum();
    e / sum
}

impl Classifier {
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self, ModelError> {
        config.validate()?;
        let encoder = encoder::builtin().get(&config.encoder)?.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = Params::new();
        params.insert(
            WORD_EMBEDDINGS,
            normal_matrix(config.vocab_size, config.dim, config.init_std, &mut rng),
        );
        params.insert(
            POSITION_EMBEDDINGS,
            normal_matrix(config.max_len, config.dim, config.init_std, &mut rng),
        );
        encoder.init(
            EncoderDims {
                dim: config.dim,
                hidden: config.hidden,
            },
            &mut rng,
            &mut params,
        );
        params.insert(
            HEAD_W,
            normal_matrix(config.hidden, NUM_CLASSES, 1.0 / (config.hidden as f64).sqrt(), &mut rng),
        );
        params.insert(HEAD_B, Array2::zeros((1, NUM_CLASSES)));
        Ok(Self {
            config,
            params,
            encoder,
        })
    }

    /// Rebuilds a classifier from stored parameters, checking every shape.
    pub fn from_parts(config: ModelConfig, params: Params) -> Result<Self, ModelError> {
        let reference = Self::new(config.clone(), 0)?;
        for (name, t) in reference.params.iter() {
            match params.try_get(name) {
                Some(p) if p.dim() == t.dim() => {}
                Some(p) => {
                    return Err(ModelError::Format(format!(
                        "tensor '{name}' has shape {:?}, expected {:?}",
                        p.dim(),
                        t.dim()
                    )))
                }
                None => return Err(ModelError::Format(format!("tensor '{name}' missing"))),
            }
        }
        if let Some(extra) = params.names().find(|n| !reference.params.contains(n)) {
            return Err(ModelError::Format(format!("unexpected tensor '{extra}'")));
        }
        Ok(Self {
            config,
            params,
            encoder: reference.encoder,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut Params {
        &mut self.params
    }

    pub fn encoder_name(&self) -> &'static str {
        self.encoder.name()
    }

    /// Input matrix for a token id sequence: word + position embeddings.
    pub fn embed(&self, ids: &[u32]) -> Array2<f64> {
        assert!(!ids.is_empty(), "cannot embed an empty sequence");
        assert!(ids.len() <= self.config.max_len, "sequence longer than max_len");
        let words = self.params.get(WORD_EMBEDDINGS);
        let positions = self.params.get(POSITION_EMBEDDINGS);
        let mut x = Array2::zeros((ids.len(), self.config.dim));
        for (i, &id) in ids.iter().enumerate() {
            let mut row = x.row_mut(i);
            row.assign(&words.row(id as usize));
            row += &positions.row(i);
        }
        x
    }

    pub fn forward_embedded(&self, x: &Array2<f64>) -> ForwardPass {
        let encoded = self.encoder.forward(&self.params, x);
        let logits = encoded.output.dot(self.params.get(HEAD_W)) + &self.params.get(HEAD_B).row(0);
        let probs = softmax(&logits);
        ForwardPass {
            encoded,
            logits,
            probs,
        }
    }

    pub fn forward(&self, ids: &[u32]) -> ForwardPass {
        self.forward_embedded(&self.embed(ids))
    }

    pub fn probabilities(&self, ids: &[u32]) -> Array1<f64> {
        self.forward(ids).probs
    }

    /// Backpropagates `d_logits` to the input matrix, accumulating head and
    /// encoder gradients into `grads` when given.
    pub fn backward(
        &self,
        x: &Array2<f64>,
        pass: &ForwardPass,
        d_logits: &Array1<f64>,
        mut grads: Option<&mut Params>,
    ) -> Array2<f64> {
        let hidden = &pass.encoded.output;
        if let Some(g) = grads.as_deref_mut() {
            let outer = hidden
                .view()
                .insert_axis(Axis(1))
                .dot(&d_logits.view().insert_axis(Axis(0)));
            *g.get_mut(HEAD_W) += &outer;
            g.get_mut(HEAD_B).row_mut(0).scaled_add(1.0, d_logits);
        }
        let d_hidden = self.params.get(HEAD_W).dot(d_logits);
        self.encoder
            .backward(&self.params, x, &pass.encoded, &d_hidden, grads)
    }

    /// Scatters an input-matrix gradient into the embedding tables.
    pub fn accumulate_embedding_grad(&self, ids: &[u32], dx: &Array2<f64>, grads: &mut Params) {
        {
            let words = grads.get_mut(WORD_EMBEDDINGS);
            for (i, &id) in ids.iter().enumerate() {
                let mut row = words.row_mut(id as usize);
                row += &dx.row(i);
            }
        }
        let mut pos = grads
            .get_mut(POSITION_EMBEDDINGS)
            .slice_mut(s![..ids.len(), ..])
            .to_owned();
        pos += dx;
        grads
            .get_mut(POSITION_EMBEDDINGS)
            .slice_mut(s![..ids.len(), ..])
            .assign(&pos);
    }

    /// Cross-entropy loss for one example; accumulates all parameter
    /// gradients (scaled by `weight`) into `grads`.
    pub fn loss_and_grad(&self, ids: &[u32], label: Label, weight: f64, grads: &mut Params) -> f64 {
        let x = self.embed(ids);
        let pass = self.forward_embedded(&x);
        let target = label.index();
        let loss = -pass.probs[target].max(f64::MIN_POSITIVE).ln();
        let mut d_logits = pass.probs.clone();
        d_logits[target] -= 1.0;
        d_logits *= weight;
        let dx = self.backward(&x, &pass, &d_logits, Some(grads));
        self.accumulate_embedding_grad(ids, &dx, grads);
        loss
    }

    /// Grows the word embedding table to `new_size` rows. New rows start at
    /// the mean of the existing rows plus small seeded noise, so added
    /// tokens begin close to an "average" token.
    pub fn resize_token_embeddings(&mut self, new_size: usize, seed: u64) {
        let old = self.params.get(WORD_EMBEDDINGS);
        let old_size = old.nrows();
        if new_size <= old_size {
            return;
        }
        let mean = old.mean_axis(Axis(0)).expect("non-empty vocab");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = normal_matrix(new_size - old_size, self.config.dim, 0.1 * self.config.init_std, &mut rng);
        let mut grown = Array2::zeros((new_size, self.config.dim));
        grown.slice_mut(s![..old_size, ..]).assign(old);
        for (i, n) in noise.rows().into_iter().enumerate() {
            grown.row_mut(old_size + i).assign(&(&mean + &n));
        }
        self.params.insert(WORD_EMBEDDINGS, grown);
        self.config.vocab_size = new_size;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(encoder: &str) -> ModelConfig {
        ModelConfig {
            encoder: encoder.to_string(),
            vocab_size: 12,
            dim: 5,
            hidden: 4,
            max_len: 8,
            init_std: 0.5,
        }
    }

    fn check_loss_gradient(encoder: &str) {
        let model = Classifier::new(config(encoder), 3).unwrap();
        let ids = [2u32, 7, 5, 7, 3];
        let mut grads = model.params().zeros_like();
        model.loss_and_grad(&ids, Label::Burnout, 1.0, &mut grads);

        let loss = |m: &Classifier| -m.probabilities(&ids)[1].ln();
        let eps = 1e-6;
        for name in model.params().names().map(str::to_string).collect::<Vec<_>>() {
            let shape = model.params().get(&name).dim();
            for r in 0..shape.0 {
                for c in 0..shape.1 {
                    let mut plus = model.clone();
                    plus.params_mut().get_mut(&name)[[r, c]] += eps;
                    let mut minus = model.clone();
                    minus.params_mut().get_mut(&name)[[r, c]] -= eps;
                    let fd = (loss(&plus) - loss(&minus)) / (2.0 * eps);
                    let an = grads.get(&name)[[r, c]];
                    assert!((fd - an).abs() < 1e-7, "{encoder} {name}[{r},{c}] fd {fd} vs {an}");
                }
            }
        }
    }

    #[test]
    fn loss_gradient_mean_pool() {
        check_loss_gradient("mean-pool");
    }

    #[test]
    fn loss_gradient_self_attention() {
        check_loss_gradient("self-attention");
    }

    #[test]
    fn probabilities_sum_to_one() {
        let model = Classifier::new(config("self-attention"), 1).unwrap();
        let p = model.probabilities(&[2, 4, 3]);
        assert!((p.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn resize_keeps_existing_rows() {
        let mut model = Classifier::new(config("mean-pool"), 1).unwrap();
        let before = model.params().get(WORD_EMBEDDINGS).clone();
        model.resize_token_embeddings(15, 9);
        let after = model.params().get(WORD_EMBEDDINGS);
        assert_eq!(after.nrows(), 15);
        assert_eq!(after.slice(s![..12, ..]), before);
        assert_eq!(model.config().vocab_size, 15);
        // the model still runs with the new ids
        model.probabilities(&[2, 13, 14, 3]);
    }

    #[test]
    fn from_parts_rejects_wrong_shapes() {
        let model = Classifier::new(config("mean-pool"), 1).unwrap();
        let mut cfg = config("mean-pool");
        cfg.vocab_size = 20;
        assert!(Classifier::from_parts(cfg, model.params().clone()).is_err());
        assert!(Classifier::from_parts(config("mean-pool"), model.params().clone()).is_ok());
    }
}
