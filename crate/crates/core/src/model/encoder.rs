//! Sequence encoders: map a `(tokens x dim)` matrix to one pooled vector.
//!
//! Architectures are stateless strategies over a shared [`Params`] map and
//! are looked up by name through [`builtin`]. Each provides an exact
//! backward pass so that both training and gradient attribution can use it.

use std::any::Any;
use std::fmt;
use std::sync::Arc;

use ndarray::{Array1, Array2, Axis};
use rand_chacha::ChaCha8Rng;

use super::params::{normal_matrix, Params};
use crate::registry::Registry;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncoderDims {
    pub dim: usize,
    pub hidden: usize,
}

pub struct EncoderPass {
    pub output: Array1<f64>,
    cache: Box<dyn Any + Send + Sync>,
}

impl EncoderPass {
    fn cache<T: 'static>(&self) -> &T {
        self.cache
            .downcast_ref::<T>()
            .expect("encoder pass produced by a different architecture")
    }
}

impl fmt::Debug for EncoderPass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EncoderPass").field("output", &self.output).finish()
    }
}

pub trait Encoder: fmt::Debug + Send + Sync {
    fn name(&self) -> &'static str;
    fn init(&self, dims: EncoderDims, rng: &mut ChaCha8Rng, params: &mut Params);
    fn forward(&self, params: &Params, x: &Array2<f64>) -> EncoderPass;
    /// Gradient of the loss w.r.t. the encoder input, given the gradient
    /// w.r.t. its output. Parameter gradients are accumulated into `grads`
    /// when provided.
    fn backward(
        &self,
        params: &Params,
        x: &Array2<f64>,
        pass: &EncoderPass,
        d_output: &Array1<f64>,
        grads: Option<&mut Params>,
    ) -> Array2<f64>;
}

pub fn builtin() -> Registry<Arc<dyn Encoder>> {
    let mut reg: Registry<Arc<dyn Encoder>> = Registry::new("encoder");
    reg.register(MeanPool.name(), Arc::new(MeanPool)).expect("unique");
    reg.register(SelfAttention.name(), Arc::new(SelfAttention)).expect("unique");
    reg
}

fn outer(a: &Array1<f64>, b: &Array1<f64>) -> Array2<f64> {
    a.view()
        .insert_axis(Axis(1))
        .dot(&b.view().insert_axis(Axis(0)))
}

/// Mean-pooled tanh projection, shared by both architectures.
struct PoolCache {
    pooled: Array1<f64>,
    hidden: Array1<f64>,
}

const POOL_W: &str = "pool.dense.weight";
const POOL_B: &str = "pool.dense.bias";

fn init_pool(dims: EncoderDims, rng: &mut ChaCha8Rng, params: &mut Params) {
    params.insert(
        POOL_W,
        normal_matrix(dims.dim, dims.hidden, 1.0 / (dims.dim as f64).sqrt(), rng),
    );
    params.insert(POOL_B, Array2::zeros((1, dims.hidden)));
}

fn pool_forward(params: &Params, y: &Array2<f64>) -> PoolCache {
    let pooled = y.mean_axis(Axis(0)).expect("non-empty sequence");
    let z = pooled.dot(params.get(POOL_W)) + &params.get(POOL_B).row(0);
    PoolCache {
        pooled,
        hidden: z.mapv(f64::tanh),
    }
}

/// Returns d(loss)/d(y) for every row of the pooled sequence.
fn pool_backward(
    params: &Params,
    rows: usize,
    cache: &PoolCache,
    d_hidden: &Array1<f64>,
    grads: Option<&mut Params>,
) -> Array2<f64> {
    let dz = d_hidden * &cache.hidden.mapv(|h| 1.0 - h * h);
    if let Some(g) = grads {
        *g.get_mut(POOL_W) += &outer(&cache.pooled, &dz);
        g.get_mut(POOL_B).row_mut(0).scaled_add(1.0, &dz);
    }
    let d_pooled = params.get(POOL_W).dot(&dz) / rows as f64;
    let width = d_pooled.len();
    d_pooled
        .insert_axis(Axis(0))
        .broadcast((rows, width))
        .expect("broadcast row")
        .to_owned()
}

/// Bag of embeddings: mean over tokens, then a tanh projection.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanPool;

impl Encoder for MeanPool {
    fn name(&self) -> &'static str {
        "mean-pool"
    }

    fn init(&self, dims: EncoderDims, rng: &mut ChaCha8Rng, params: &mut Params) {
        init_pool(dims, rng, params);
    }

    fn forward(&self, params: &Params, x: &Array2<f64>) -> EncoderPass {
        let cache = pool_forward(params, x);
        EncoderPass {
            output: cache.hidden.clone(),
            cache: Box::new(cache),
        }
    }

    fn backward(
        &self,
        params: &Params,
        x: &Array2<f64>,
        pass: &EncoderPass,
        d_output: &Array1<f64>,
        grads: Option<&mut Params>,
    ) -> Array2<f64> {
        pool_backward(params, x.nrows(), pass.cache::<PoolCache>(), d_output, grads)
    }
}

/// One single-head self-attention block with a residual connection,
/// followed by the mean-pooled tanh projection.
#[derive(Debug, Clone, Copy, Default)]
pub struct SelfAttention;

const ATT_Q: &str = "attention.query.weight";
const ATT_K: &str = "attention.key.weight";
const ATT_V: &str = "attention.value.weight";
const ATT_O: &str = "attention.output.weight";

struct AttentionCache {
    q: Array2<f64>,
    k: Array2<f64>,
    v: Array2<f64>,
    weights: Array2<f64>,
    context: Array2<f64>,
    pool: PoolCache,
}

impl Encoder for SelfAttention {
    fn name(&self) -> &'static str {
        "self-attention"
    }

    fn init(&self, dims: EncoderDims, rng: &mut ChaCha8Rng, params: &mut Params) {
        let std = 1.0 / (dims.dim as f64).sqrt();
        for name in [ATT_Q, ATT_K, ATT_V] {
            params.insert(name, normal_matrix(dims.dim, dims.dim, std, rng));
        }
        // small output projection: the block starts close to the identity
        params.insert(ATT_O, normal_matrix(dims.dim, dims.dim, 0.1 * std, rng));
        init_pool(dims, rng, params);
    }

    fn forward(&self, params: &Params, x: &Array2<f64>) -> EncoderPass {
        let scale = 1.0 / (x.ncols() as f64).sqrt();
        let q = x.dot(params.get(ATT_Q));
        let k = x.dot(params.get(ATT_K));
        let v = x.dot(params.get(ATT_V));
        let mut weights = q.dot(&k.t()) * scale;
        for mut row in weights.rows_mut() {
            let max = row.fold(f64::NEG_INFINITY, |m, &s| m.max(s));
            row.mapv_inplace(|s| (s - max).exp());
            let sum = row.sum();
            row /= sum;
        }
        let context = weights.dot(&v);
        let y = x + &context.dot(params.get(ATT_O));
        let pool = pool_forward(params, &y);
        EncoderPass {
            output: pool.hidden.clone(),
            cache: Box::new(AttentionCache {
                q,
                k,
                v,
                weights,
                context,
                pool,
            }),
        }
    }

    fn backward(
        &self,
        params: &Params,
        x: &Array2<f64>,
        pass: &EncoderPass,
        d_output: &Array1<f64>,
        mut grads: Option<&mut Params>,
    ) -> Array2<f64> {
        let c = pass.cache::<AttentionCache>();
        let scale = 1.0 / (x.ncols() as f64).sqrt();
        let dy = pool_backward(params, x.nrows(), &c.pool, d_output, grads.as_deref_mut());

        // y = x + context . Wo
        let d_context = dy.dot(&params.get(ATT_O).t());
        // context = A . V
        let d_weights = d_context.dot(&c.v.t());
        let dv = c.weights.t().dot(&d_context);
        // row-wise softmax backward
        let mut d_scores = d_weights.clone();
        for (mut ds, (a, da)) in d_scores
            .rows_mut()
            .into_iter()
            .zip(c.weights.rows().into_iter().zip(d_weights.rows()))
        {
            let dot = a.dot(&da);
            ds.assign(&(&a * &(&da - dot)));
        }
        d_scores *= scale;
        let dq = d_scores.dot(&c.k);
        let dk = d_scores.t().dot(&c.q);

        if let Some(g) = grads {
            *g.get_mut(ATT_O) += &c.context.t().dot(&dy);
            *g.get_mut(ATT_Q) += &x.t().dot(&dq);
            *g.get_mut(ATT_K) += &x.t().dot(&dk);
            *g.get_mut(ATT_V) += &x.t().dot(&dv);
        }
        dy + dq.dot(&params.get(ATT_Q).t())
            + dk.dot(&params.get(ATT_K).t())
            + dv.dot(&params.get(ATT_V).t())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    /// Scalar probe: weighted sum of the encoder output.
    fn probe(enc: &dyn Encoder, params: &Params, x: &Array2<f64>, w: &Array1<f64>) -> f64 {
        enc.forward(params, x).output.dot(w)
    }

    fn check_gradients(enc: &dyn Encoder) {
        let dims = EncoderDims { dim: 6, hidden: 5 };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut params = Params::new();
        enc.init(dims, &mut rng, &mut params);
        // larger output projection so the attention path matters
        if params.contains(ATT_O) {
            params.insert(ATT_O, normal_matrix(6, 6, 0.5, &mut rng));
        }
        let x = normal_matrix(4, 6, 1.0, &mut rng);
        let w = Array1::from_iter((0..5).map(|i| 0.3 * i as f64 - 0.5));

        let pass = enc.forward(&params, &x);
        let mut grads = params.zeros_like();
        let dx = enc.backward(&params, &x, &pass, &w, Some(&mut grads));

        let eps = 1e-6;
        // input gradient: central differences
        for i in 0..x.nrows() {
            for j in 0..x.ncols() {
                let mut plus = x.clone();
                plus[[i, j]] += eps;
                let mut minus = x.clone();
                minus[[i, j]] -= eps;
                let fd = (probe(enc, &params, &plus, &w) - probe(enc, &params, &minus, &w)) / (2.0 * eps);
                assert!((fd - dx[[i, j]]).abs() < 1e-7, "{} dx[{i},{j}]: fd {fd} vs {}", enc.name(), dx[[i, j]]);
            }
        }
        // parameter gradients
        let names: Vec<String> = params.names().map(str::to_string).collect();
        for name in names {
            let shape = params.get(&name).dim();
            for r in 0..shape.0 {
                for c in 0..shape.1 {
                    let mut plus = params.clone();
                    plus.get_mut(&name)[[r, c]] += eps;
                    let mut minus = params.clone();
                    minus.get_mut(&name)[[r, c]] -= eps;
                    let fd = (probe(enc, &plus, &x, &w) - probe(enc, &minus, &x, &w)) / (2.0 * eps);
                    let an = grads.get(&name)[[r, c]];
                    assert!((fd - an).abs() < 1e-7, "{} {name}[{r},{c}]: fd {fd} vs {an}", enc.name());
                }
            }
        }
    }

    #[test]
    fn mean_pool_gradients_match_finite_differences() {
        check_gradients(&MeanPool);
    }

    #[test]
    fn self_attention_gradients_match_finite_differences() {
        check_gradients(&SelfAttention);
    }

    #[test]
    fn registry_lists_architectures() {
        let names: Vec<_> = builtin().names().map(str::to_string).collect();
        assert_eq!(names, vec!["mean-pool", "self-attention"]);
    }
}
