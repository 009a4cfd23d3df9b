use std::sync::Arc;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use super::integrators::{self, PathIntegrator};
use super::ExplainError;
use crate::model::Classifier;
use crate::text::{Encoding, Tokenizer, CONTINUATION};
use crate::trainer::{label_for_score, ClassifierArtifact};
use crate::Label;

pub const MIN_STEPS: usize = 8;
pub const DEFAULT_STEPS: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenAttribution {
    pub token: String,
    pub score: f64,
    /// `[CLS]`, `[SEP]` and the like.
    pub special: bool,
}

/// Sub-word tokens merged back into words, scores summed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordAttribution {
    pub word: String,
    pub score: f64,
    /// Indices into the token list.
    pub tokens: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribution {
    pub target: Label,
    pub tokens: Vec<TokenAttribution>,
    pub words: Vec<WordAttribution>,
    /// Target-class probability at the input and at the baseline.
    pub f_input: f64,
    pub f_baseline: f64,
    /// |sum of scores - (f_input - f_baseline)|
    pub residual: f64,
    pub method: String,
    pub steps: usize,
    pub truncated: bool,
}

impl Attribution {
    pub fn delta(&self) -> f64 {
        self.f_input - self.f_baseline
    }

    pub fn total(&self) -> f64 {
        self.tokens.iter().map(|t| t.score).sum()
    }

    /// The non-special token with the largest absolute score.
    pub fn top_token(&self) -> Option<&TokenAttribution> {
        self.tokens
            .iter()
            .filter(|t| !t.special)
            .max_by(|a, b| a.score.abs().total_cmp(&b.score.abs()))
    }
}

#[derive(Debug, Clone)]
pub struct AttributeOptions {
    pub steps: usize,
    pub method: String,
    /// Class to explain; the predicted class when `None`.
    pub target: Option<Label>,
}

impl Default for AttributeOptions {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            method: integrators::DEFAULT_INTEGRATOR.into(),
            target: None,
        }
    }
}

/// Baseline ids: the input's special markers kept in place, every other
/// position replaced by padding.
pub fn baseline_ids(tokenizer: &Tokenizer, ids: &[u32]) -> Vec<u32> {
    ids.iter()
        .map(|&id| {
            if id == tokenizer.cls_id() || id == tokenizer.sep_id() {
                id
            } else {
                tokenizer.pad_id()
            }
        })
        .collect()
}

fn target_gradient(model: &Classifier, x: &ndarray::Array2<f64>, target: usize) -> (f64, ndarray::Array2<f64>) {
    let pass = model.forward_embedded(x);
    let p = &pass.probs;
    // d p_t / d logits = p_t (e_t - p)
    let mut d_logits: Array1<f64> = -p * p[target];
    d_logits[target] += p[target];
    let dx = model.backward(x, &pass, &d_logits, None);
    (p[target], dx)
}

/// Integrated gradients over the input embeddings.
pub fn attribute_ids(
    tokenizer: &Tokenizer,
    model: &Classifier,
    encoding: &Encoding,
    options: &AttributeOptions,
) -> Result<Attribution, ExplainError> {
    if options.steps < MIN_STEPS {
        return Err(ExplainError::TooFewSteps(options.steps));
    }
    let integrator: Arc<dyn PathIntegrator> = integrators::builtin().get(&options.method)?.clone();
    let ids = &encoding.ids;
    let x = model.embed(ids);
    let x0 = model.embed(&baseline_ids(tokenizer, ids));
    let diff = &x - &x0;

    let f_input_probs = model.forward_embedded(&x).probs;
    let target = options
        .target
        .unwrap_or_else(|| label_for_score(f_input_probs[1]));
    let t = target.index();

    let mut avg_grad = ndarray::Array2::<f64>::zeros(x.raw_dim());
    for (alpha, weight) in integrator.nodes(options.steps) {
        let point = &x0 + &(&diff * alpha);
        let (_, g) = target_gradient(model, &point, t);
        avg_grad.scaled_add(weight, &g);
    }
    let per_token = (&diff * &avg_grad).sum_axis(ndarray::Axis(1));
    let f_input = f_input_probs[t];
    let f_baseline = model.forward_embedded(&x0).probs[t];

    let tokens: Vec<TokenAttribution> = ids
        .iter()
        .zip(&encoding.tokens)
        .zip(per_token.iter())
        .map(|((&id, tok), &score)| TokenAttribution {
            token: tok.clone(),
            score,
            special: tokenizer.is_special_id(id),
        })
        .collect();
    let total: f64 = tokens.iter().map(|t| t.score).sum();
    let words = merge_words(&tokens);
    Ok(Attribution {
        target,
        tokens,
        words,
        f_input,
        f_baseline,
        residual: (total - (f_input - f_baseline)).abs(),
        method: integrator.name().to_string(),
        steps: options.steps,
        truncated: encoding.truncated,
    })
}

pub fn attribute(artifact: &ClassifierArtifact, text: &str, options: &AttributeOptions) -> Result<Attribution, ExplainError> {
    if text.trim().is_empty() {
        return Err(ExplainError::EmptyText);
    }
    let encoding = artifact.encode(text);
    if encoding.truncated {
        log::warn!("input truncated to {} tokens for attribution", encoding.len());
    }
    attribute_ids(&artifact.tokenizer, &artifact.model, &encoding, options)
}

/// Joins `##` continuation pieces onto the preceding token.
pub fn merge_words(tokens: &[TokenAttribution]) -> Vec<WordAttribution> {
    let mut words: Vec<WordAttribution> = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        if t.special {
            continue;
        }
        match (t.token.strip_prefix(CONTINUATION), words.last_mut()) {
            (Some(piece), Some(last)) if last.tokens.last() == Some(&(i - 1)) => {
                last.word.push_str(piece);
                last.score += t.score;
                last.tokens.push(i);
            }
            _ => words.push(WordAttribution {
                word: t.token.clone(),
                score: t.score,
                tokens: vec![i],
            }),
        }
    }
    words
}
