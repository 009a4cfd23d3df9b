use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::artifact::{label_for_score, ClassifierArtifact};
use super::config::TrainConfig;
use super::optim::{clip_grad_norm, learning_rate, AdamW};
use super::timeline::{MetricsTimeline, TimelinePoint};
use super::{base_models, TrainError};
use crate::corpus::Dataset;
use crate::metrics::{Confusion, Metrics};
use crate::model::Classifier;
use crate::seed::stable_seed;
use crate::text::Tokenizer;
use crate::Label;

/// Fresh tokenizer and classifier for the configured base model. Weights
/// are initialized from a seed derived from the base model id and the run
/// seed.
pub fn load_base(config: &TrainConfig) -> Result<(Tokenizer, Classifier), TrainError> {
    let base = base_models().get(&config.base_model_id)?.clone();
    let tokenizer = Tokenizer::base_german();
    let model_config = base.model_config(tokenizer.vocab_size());
    let seed = stable_seed(&[&config.base_model_id, &config.rng_seed.to_string(), "init"]);
    let model = Classifier::new(model_config, seed)?;
    Ok((tokenizer, model))
}

/// Adds unseen whole words to the tokenizer and grows the embedding table
/// to match. Returns the number of tokens added.
pub fn extend_vocabulary(tokenizer: &mut Tokenizer, model: &mut Classifier, terms: &[String]) -> usize {
    let added = tokenizer.extend_vocabulary(terms);
    if added > 0 {
        let seed = stable_seed(&["resize", &tokenizer.vocab_size().to_string()]);
        model.resize_token_embeddings(tokenizer.vocab_size(), seed);
    }
    debug_assert_eq!(tokenizer.vocab_size(), model.config().vocab_size);
    added
}

struct Encoded {
    ids: Vec<u32>,
    label: Label,
}

fn encode_all(tokenizer: &Tokenizer, model: &Classifier, data: &Dataset) -> Vec<Encoded> {
    let max_len = model.config().max_len;
    data.samples()
        .iter()
        .map(|s| Encoded {
            ids: tokenizer.encode(&s.text, max_len).ids,
            label: s.label,
        })
        .collect()
}

fn evaluate(model: &Classifier, data: &[Encoded], batch: usize) -> (f64, Metrics) {
    let mut loss = 0.0;
    let mut confusion = Confusion::default();
    for chunk in data.chunks(batch) {
        for ex in chunk {
            let p = model.probabilities(&ex.ids);
            loss -= p[ex.label.index()].max(f64::MIN_POSITIVE).ln();
            confusion.add(label_for_score(p[1]), ex.label);
        }
    }
    (loss / data.len() as f64, confusion.metrics())
}

/// Interval between evaluations so that a run yields at least `points`
/// timeline entries (when it has that many steps at all).
pub fn eval_interval(total_steps: usize, points: usize) -> usize {
    (total_steps / points.max(1)).max(1)
}

pub fn fine_tune(
    train: &Dataset,
    eval: &Dataset,
    config: &TrainConfig,
    tokenizer: Tokenizer,
    mut model: Classifier,
) -> Result<(ClassifierArtifact, MetricsTimeline), TrainError> {
    config.validate()?;
    if train.is_empty() {
        return Err(TrainError::EmptyTrainSet);
    }
    if eval.is_empty() {
        return Err(TrainError::EmptyEvalSet);
    }
    let counts = train.counts();
    if counts.burnout == 0 || counts.control == 0 {
        let present = if counts.burnout == 0 { Label::NoBurnout } else { Label::Burnout };
        return Err(TrainError::SingleClass { present });
    }
    if tokenizer.vocab_size() != model.config().vocab_size {
        return Err(TrainError::Config(format!(
            "tokenizer has {} tokens but the model has {} embeddings",
            tokenizer.vocab_size(),
            model.config().vocab_size
        )));
    }

    let train_set = encode_all(&tokenizer, &model, train);
    let eval_set = encode_all(&tokenizer, &model, eval);
    let batch = config.train_batch_size;
    let steps_per_epoch = train_set.len().div_ceil(batch);
    let total_steps = steps_per_epoch * config.epochs as usize;
    let interval = eval_interval(total_steps, config.min_eval_points);
    log::info!(
        "training on {} samples ({} eval), {} steps, evaluating every {} steps",
        train_set.len(),
        eval_set.len(),
        total_steps,
        interval
    );

    let mut rng = ChaCha8Rng::seed_from_u64(stable_seed(&[&config.rng_seed.to_string(), "shuffle"]));
    let mut optimizer = AdamW::new(model.params(), config.optimizer.clone(), config.weight_decay);
    let mut grads = model.params().zeros_like();
    let mut timeline = MetricsTimeline::new();
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut step = 0;
    let mut window_loss = 0.0;
    let mut window_steps = 0;

    for epoch in 0..config.epochs as usize {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            grads.fill_zero();
            let weight = 1.0 / chunk.len() as f64;
            let mut loss = 0.0;
            for &i in chunk {
                let ex = &train_set[i];
                loss += weight * model.loss_and_grad(&ex.ids, ex.label, weight, &mut grads);
            }
            let grad_norm = clip_grad_norm(&mut grads, config.optimizer.max_grad_norm);
            if !loss.is_finite() || !grad_norm.is_finite() {
                return Err(TrainError::NonFinite {
                    step,
                    epoch,
                    loss,
                    grad_norm,
                });
            }
            let lr = learning_rate(config.optimizer.learning_rate, step, config.warmup_steps, total_steps);
            optimizer.step(model.params_mut(), &grads, lr);
            step += 1;
            window_loss += loss;
            window_steps += 1;

            if step % interval == 0 || step == total_steps {
                let (eval_loss, m) = evaluate(&model, &eval_set, config.eval_batch_size);
                let point = TimelinePoint {
                    step,
                    epoch: step as f64 / steps_per_epoch as f64,
                    training_loss: window_loss / window_steps as f64,
                    eval_loss,
                    eval_f1: m.f1,
                    eval_accuracy: m.accuracy,
                };
                log::debug!("step {step}: {point:?}");
                timeline.push(point);
                window_loss = 0.0;
                window_steps = 0;
            }
        }
    }
    if !model.params().all_finite() {
        return Err(TrainError::NonFinite {
            step,
            epoch: config.epochs as usize,
            loss: f64::NAN,
            grad_norm: f64::NAN,
        });
    }
    let artifact = ClassifierArtifact::new(
        train.name.as_str(),
        config,
        tokenizer,
        model,
        timeline.clone(),
        (train_set.len(), eval_set.len()),
    );
    Ok((artifact, timeline))
}
