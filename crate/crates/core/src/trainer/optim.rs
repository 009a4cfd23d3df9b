use super::config::OptimizerSettings;
use crate::model::Params;

/// Linear warmup to the peak rate, then linear decay to zero at the last
/// step. When training is shorter than the warmup the rate never peaks.
pub fn learning_rate(peak: f64, step: usize, warmup: usize, total: usize) -> f64 {
    if step < warmup {
        peak * step as f64 / warmup.max(1) as f64
    } else {
        let remaining = total.saturating_sub(step) as f64;
        let span = total.saturating_sub(warmup).max(1) as f64;
        peak * (remaining / span).max(0.0)
    }
}

/// Rescales gradients so their global norm is at most `max_norm`.
/// Returns the norm before clipping.
pub fn clip_grad_norm(grads: &mut Params, max_norm: f64) -> f64 {
    let norm = grads.global_norm();
    if max_norm > 0.0 && norm > max_norm {
        grads.scale(max_norm / (norm + 1e-6));
    }
    norm
}

fn decays(name: &str) -> bool {
    !name.ends_with(".bias")
}

/// Adam with decoupled weight decay. Biases are not decayed.
#[derive(Debug, Clone)]
pub struct AdamW {
    settings: OptimizerSettings,
    weight_decay: f64,
    m: Params,
    v: Params,
    t: i32,
}

impl AdamW {
    pub fn new(params: &Params, settings: OptimizerSettings, weight_decay: f64) -> Self {
        Self {
            settings,
            weight_decay,
            m: params.zeros_like(),
            v: params.zeros_like(),
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut Params, grads: &Params, lr: f64) {
        self.t += 1;
        let s = &self.settings;
        let bc1 = 1.0 - s.beta1.powi(self.t);
        let bc2 = 1.0 - s.beta2.powi(self.t);
        for (name, p) in params.iter_mut() {
            let g = grads.get(name);
            let m = self.m.get_mut(name);
            let v = self.v.get_mut(name);
            let decay = if decays(name) { lr * self.weight_decay } else { 0.0 };
            ndarray::Zip::from(p)
                .and(g)
                .and(m)
                .and(v)
                .for_each(|p, &g, m, v| {
                    *p -= decay * *p;
                    *m = s.beta1 * *m + (1.0 - s.beta1) * g;
                    *v = s.beta2 * *v + (1.0 - s.beta2) * g * g;
                    *p -= lr * (*m / bc1) / ((*v / bc2).sqrt() + s.epsilon);
                });
        }
    }
}
