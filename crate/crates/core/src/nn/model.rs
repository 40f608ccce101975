//! Forward pass and hand-derived backward pass of the graph scoring model.
//!
//! Per GEM iteration and vertex `v`, with `s_v` the sum of neighbour
//! embeddings and `t_v` the sum over all other non-neighbours:
//!
//! ```text
//! pre_v  = [A mu_v + a || B s_v + b || C t_v + c]
//! mu'_v  = LayerNorm(GELU(pre_v))
//! ```
//!
//! `t_v` is computed as `total - s_v - mu_v`, so an iteration costs
//! `O(n + m)` vector operations rather than `O(n^2)`. The graph embedding is
//! the mean of the final node embeddings, followed by GELU + LayerNorm dense
//! layers and an affine output on `[h_last || h_first]`.

use thiserror::Error;

use super::params::{dot, LayerNorm, Params};
use super::scalar::{gelu, gelu_grad, Scalar};
use crate::graph::Graph;

pub const LAYER_NORM_EPS: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("non-finite value in {stage}")]
pub struct NonFiniteError {
    pub stage: String,
}

/// Saved activations of one layer norm, enough for its backward pass.
#[derive(Debug, Clone, Default)]
struct NormCache<T> {
    normalized: Vec<T>,
    inv_std: T,
}

fn layer_norm_forward<T: Scalar>(x: &[T], ln: &LayerNorm<T>, out: &mut [T]) -> NormCache<T> {
    let d = T::from_usize(x.len()).unwrap();
    let mean = x.iter().copied().sum::<T>() / d;
    let var = x.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / d;
    let inv_std = T::one() / (var + T::lit(LAYER_NORM_EPS)).sqrt();
    let normalized: Vec<T> = x.iter().map(|&v| (v - mean) * inv_std).collect();
    for (i, o) in out.iter_mut().enumerate() {
        *o = ln.gamma[i] * normalized[i] + ln.beta[i];
    }
    NormCache {
        normalized,
        inv_std,
    }
}

/// Returns `d loss / d x` and accumulates the scale/shift gradients.
fn layer_norm_backward<T: Scalar>(
    dy: &[T],
    cache: &NormCache<T>,
    ln: &LayerNorm<T>,
    grad: &mut LayerNorm<T>,
    dx: &mut [T],
) {
    let d = T::from_usize(dy.len()).unwrap();
    let mut mean_g = T::zero();
    let mut mean_gx = T::zero();
    for i in 0..dy.len() {
        let g = dy[i] * ln.gamma[i];
        grad.gamma[i] = grad.gamma[i] + dy[i] * cache.normalized[i];
        grad.beta[i] = grad.beta[i] + dy[i];
        mean_g = mean_g + g;
        mean_gx = mean_gx + g * cache.normalized[i];
    }
    mean_g = mean_g / d;
    mean_gx = mean_gx / d;
    for i in 0..dy.len() {
        let g = dy[i] * ln.gamma[i];
        dx[i] = cache.inv_std * (g - mean_g - cache.normalized[i] * mean_gx);
    }
}

#[derive(Debug, Clone)]
struct GemCache<T> {
    /// Pre-activations, `n x 3p`.
    pre: Vec<T>,
    /// Neighbour sums, `n x 3p`.
    nbr_sum: Vec<T>,
    /// Strict non-neighbour sums, `n x 3p`.
    anti_sum: Vec<T>,
    norms: Vec<NormCache<T>>,
}

#[derive(Debug, Clone)]
struct HeadCache<T> {
    input: Vec<T>,
    pre: Vec<T>,
    norm: NormCache<T>,
    out: Vec<T>,
}

/// Everything the forward pass produced, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardTrace<T> {
    n: usize,
    /// `embeddings[k]` is the `n x 3p` node-embedding matrix after `k`
    /// iterations; `embeddings[0]` is all zeros.
    pub embeddings: Vec<Vec<T>>,
    gem: Vec<GemCache<T>>,
    /// Mean of the final node embeddings.
    pub pooled: Vec<T>,
    head: Vec<HeadCache<T>>,
    output_input: Vec<T>,
    pub logit: T,
}

impl<T: Scalar> ForwardTrace<T> {
    pub fn num_vertices(&self) -> usize {
        self.n
    }

    /// Outputs of the hidden head layers, first to last.
    pub fn head_activations(&self) -> impl Iterator<Item = &[T]> {
        self.head.iter().map(|h| h.out.as_slice())
    }

    /// Locates the first non-finite stored value.
    pub fn check_finite(&self) -> Result<(), NonFiniteError> {
        let bad = |xs: &[T]| xs.iter().any(|x| !x.is_finite());
        for (k, emb) in self.embeddings.iter().enumerate() {
            if bad(emb) {
                return Err(NonFiniteError {
                    stage: format!("gem iteration {k} embeddings"),
                });
            }
        }
        for (k, c) in self.gem.iter().enumerate() {
            if bad(&c.pre) || bad(&c.nbr_sum) || bad(&c.anti_sum) {
                return Err(NonFiniteError {
                    stage: format!("gem iteration {k} pre-activations"),
                });
            }
        }
        if bad(&self.pooled) {
            return Err(NonFiniteError {
                stage: "mean pooling".into(),
            });
        }
        for (i, h) in self.head.iter().enumerate() {
            if bad(&h.pre) || bad(&h.out) {
                return Err(NonFiniteError {
                    stage: format!("head layer {i}"),
                });
            }
        }
        if !self.logit.is_finite() {
            return Err(NonFiniteError {
                stage: "output logit".into(),
            });
        }
        Ok(())
    }
}

/// Scores a graph. The empty graph scores 0 by convention.
pub fn score_graph<T: Scalar>(params: &Params<T>, g: &Graph) -> (T, ForwardTrace<T>) {
    let geo = params.geometry();
    let (n, p, e) = (g.n(), geo.p, geo.embed_dim());
    let mut trace = ForwardTrace {
        n,
        embeddings: vec![vec![T::zero(); n * e]],
        gem: Vec::with_capacity(geo.k),
        pooled: vec![T::zero(); e],
        head: Vec::with_capacity(geo.l - 1),
        output_input: Vec::new(),
        logit: T::zero(),
    };
    if n == 0 {
        return (T::zero(), trace);
    }

    for layer in &params.gem {
        let mu = trace.embeddings.last().expect("embeddings start non-empty");
        let mut total = vec![T::zero(); e];
        for row in mu.chunks_exact(e) {
            add_into(&mut total, row);
        }
        let mut nbr_sum = vec![T::zero(); n * e];
        let mut anti_sum = vec![T::zero(); n * e];
        let mut pre = vec![T::zero(); n * e];
        let mut next = vec![T::zero(); n * e];
        let mut norms = Vec::with_capacity(n);
        let mut act = vec![T::zero(); e];
        for v in 0..n {
            let s = &mut nbr_sum[v * e..(v + 1) * e];
            for &u in g.neighbors(v) {
                add_into(s, &mu[u * e..(u + 1) * e]);
            }
            let mu_v = &mu[v * e..(v + 1) * e];
            let t = &mut anti_sum[v * e..(v + 1) * e];
            for i in 0..e {
                t[i] = total[i] - s[i] - mu_v[i];
            }
            let pre_v = &mut pre[v * e..(v + 1) * e];
            layer.self_proj.apply(mu_v, &mut pre_v[..p]);
            layer.nbr_proj.apply(s, &mut pre_v[p..2 * p]);
            layer.anti_proj.apply(t, &mut pre_v[2 * p..]);
            for (a, &x) in act.iter_mut().zip(pre_v.iter()) {
                *a = gelu(x);
            }
            norms.push(layer_norm_forward(
                &act,
                &layer.norm,
                &mut next[v * e..(v + 1) * e],
            ));
        }
        trace.gem.push(GemCache {
            pre,
            nbr_sum,
            anti_sum,
            norms,
        });
        trace.embeddings.push(next);
    }

    let last = trace.embeddings.last().unwrap();
    let inv_n = T::one() / T::from_usize(n).unwrap();
    for row in last.chunks_exact(e) {
        add_into(&mut trace.pooled, row);
    }
    for x in &mut trace.pooled {
        *x = *x * inv_n;
    }

    let mut input = trace.pooled.clone();
    for layer in &params.hidden {
        let mut pre = vec![T::zero(); layer.linear.outputs];
        layer.linear.apply(&input, &mut pre);
        let act: Vec<T> = pre.iter().map(|&x| gelu(x)).collect();
        let mut out = vec![T::zero(); layer.linear.outputs];
        let norm = layer_norm_forward(&act, &layer.norm, &mut out);
        trace.head.push(HeadCache {
            input: std::mem::take(&mut input),
            pre,
            norm,
            out: out.clone(),
        });
        input = out;
    }
    let mut z = input;
    z.extend_from_slice(&trace.head[0].out);
    trace.logit = params.output.bias[0] + dot(&params.output.weight, &z);
    trace.output_input = z;
    (trace.logit, trace)
}

/// Logit only.
pub fn score<T: Scalar>(params: &Params<T>, g: &Graph) -> T {
    score_graph(params, g).0
}

#[inline]
fn add_into<T: Scalar>(dst: &mut [T], src: &[T]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = *d + s;
    }
}

/// Accumulates `dlogit * d logit / d theta` into `grads`.
pub fn backward<T: Scalar>(
    params: &Params<T>,
    g: &Graph,
    trace: &ForwardTrace<T>,
    dlogit: T,
    grads: &mut Params<T>,
) {
    let geo = params.geometry();
    let (n, p, e) = (trace.n, geo.p, geo.embed_dim());
    if n == 0 {
        return;
    }
    debug_assert_eq!(n, g.n());

    // Output layer on [h_last || h_first].
    grads.output.accumulate_grad(&[dlogit], &trace.output_input);
    let mut dz = vec![T::zero(); 2 * p];
    params.output.apply_transpose_add(&[dlogit], &mut dz);

    let depth = params.hidden.len();
    let mut dh: Vec<Vec<T>> = params
        .hidden
        .iter()
        .map(|h| vec![T::zero(); h.linear.outputs])
        .collect();
    add_into(&mut dh[depth - 1], &dz[..p]);
    add_into(&mut dh[0], &dz[p..]);

    let mut dpooled = vec![T::zero(); e];
    for i in (0..depth).rev() {
        let layer = &params.hidden[i];
        let cache = &trace.head[i];
        let mut dact = vec![T::zero(); layer.linear.outputs];
        layer_norm_backward(
            &dh[i],
            &cache.norm,
            &layer.norm,
            &mut grads.hidden[i].norm,
            &mut dact,
        );
        let dpre: Vec<T> = dact
            .iter()
            .zip(&cache.pre)
            .map(|(&d, &x)| d * gelu_grad(x))
            .collect();
        grads.hidden[i].linear.accumulate_grad(&dpre, &cache.input);
        if i > 0 {
            let (lo, _) = dh.split_at_mut(i);
            layer.linear.apply_transpose_add(&dpre, &mut lo[i - 1]);
        } else {
            layer.linear.apply_transpose_add(&dpre, &mut dpooled);
        }
    }

    // Mean pooling.
    let inv_n = T::one() / T::from_usize(n).unwrap();
    let mut dmu: Vec<T> = (0..n)
        .flat_map(|_| dpooled.iter().map(|&d| d * inv_n))
        .collect();

    let mut dg = vec![T::zero(); e];
    let mut dpre = vec![T::zero(); e];
    for k in (0..geo.k).rev() {
        let layer = &params.gem[k];
        let cache = &trace.gem[k];
        let mu = &trace.embeddings[k];
        let grad_layer = &mut grads.gem[k];
        let need_input_grad = k > 0;

        let mut dself = vec![T::zero(); n * e];
        let mut dnbr = vec![T::zero(); n * e];
        let mut danti = vec![T::zero(); n * e];
        for v in 0..n {
            let row = v * e..(v + 1) * e;
            layer_norm_backward(
                &dmu[row.clone()],
                &cache.norms[v],
                &layer.norm,
                &mut grad_layer.norm,
                &mut dg,
            );
            for i in 0..e {
                dpre[i] = dg[i] * gelu_grad(cache.pre[v * e + i]);
            }
            let (da, rest) = dpre.split_at(p);
            let (db, dc) = rest.split_at(p);
            grad_layer.self_proj.accumulate_grad(da, &mu[row.clone()]);
            grad_layer
                .nbr_proj
                .accumulate_grad(db, &cache.nbr_sum[row.clone()]);
            grad_layer
                .anti_proj
                .accumulate_grad(dc, &cache.anti_sum[row.clone()]);
            if need_input_grad {
                layer
                    .self_proj
                    .apply_transpose_add(da, &mut dself[row.clone()]);
                layer
                    .nbr_proj
                    .apply_transpose_add(db, &mut dnbr[row.clone()]);
                layer.anti_proj.apply_transpose_add(dc, &mut danti[row]);
            }
        }
        if !need_input_grad {
            break;
        }
        // mu_u feeds s_v for v in N(u), and t_v for every v outside N[u].
        let mut anti_total = vec![T::zero(); e];
        for row in danti.chunks_exact(e) {
            add_into(&mut anti_total, row);
        }
        let mut next = vec![T::zero(); n * e];
        for u in 0..n {
            let out = &mut next[u * e..(u + 1) * e];
            for i in 0..e {
                out[i] = dself[u * e + i] + anti_total[i] - danti[u * e + i];
            }
            for &v in g.neighbors(u) {
                for i in 0..e {
                    out[i] = out[i] + dnbr[v * e + i] - danti[v * e + i];
                }
            }
        }
        dmu = next;
    }
}

/// Numerically stable `ln(1 + e^x)`.
fn softplus<T: Scalar>(x: T) -> T {
    x.max(T::zero()) + (-x.abs()).exp().ln_1p()
}

fn sigmoid<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let ex = x.exp();
        ex / (T::one() + ex)
    }
}

/// Cross-entropy of `softmax([M(g) || M(g2)])` against `label`, where label
/// 1 says the second graph is the better one.
pub fn pair_loss_from_logits<T: Scalar>(first: T, second: T, label: bool) -> T {
    let z = second - first;
    if label {
        softplus(-z)
    } else {
        softplus(z)
    }
}

pub fn pair_loss<T: Scalar>(params: &Params<T>, g: &Graph, g2: &Graph, label: bool) -> T {
    pair_loss_from_logits(score(params, g), score(params, g2), label)
}

/// Loss and exact gradient for one labelled pair.
pub fn pair_loss_and_grad<T: Scalar>(
    params: &Params<T>,
    g: &Graph,
    g2: &Graph,
    label: bool,
) -> Result<(T, Params<T>), NonFiniteError> {
    let mut grads = Params::zeros(params.geometry());
    let loss = accumulate_pair_grad(params, g, g2, label, &mut grads)?;
    Ok((loss, grads))
}

/// Adds the gradient of one pair's loss into `grads` and returns the loss.
pub fn accumulate_pair_grad<T: Scalar>(
    params: &Params<T>,
    g: &Graph,
    g2: &Graph,
    label: bool,
    grads: &mut Params<T>,
) -> Result<T, NonFiniteError> {
    let (l1, t1) = score_graph(params, g);
    t1.check_finite().map_err(|e| NonFiniteError {
        stage: format!("first graph: {}", e.stage),
    })?;
    let (l2, t2) = score_graph(params, g2);
    t2.check_finite().map_err(|e| NonFiniteError {
        stage: format!("second graph: {}", e.stage),
    })?;
    let loss = pair_loss_from_logits(l1, l2, label);
    let y = if label { T::one() } else { T::zero() };
    let d2 = sigmoid(l2 - l1) - y;
    backward(params, g, &t1, -d2, grads);
    backward(params, g2, &t2, d2, grads);
    if !loss.is_finite() {
        return Err(NonFiniteError {
            stage: "pair loss".into(),
        });
    }
    Ok(loss)
}

/// `CMP(g, g2) = [M(g) < M(g2)]`.
pub fn compare<T: Scalar>(params: &Params<T>, g: &Graph, g2: &Graph) -> bool {
    score(params, g) < score(params, g2)
}
