use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::Scalar;

/// Network shape: `k` GEM iterations, branch width `p` (node embeddings have
/// `3p` entries) and `l` fully connected head layers.
///
/// The head maps `3p -> p`, then `l - 2` times `p -> p`, and finally
/// `2p -> 1` on the last hidden activation concatenated with the first one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Geometry {
    pub k: usize,
    pub p: usize,
    pub l: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid geometry K={k}, p={p}, L={l}: {reason}")]
pub struct GeometryError {
    pub k: usize,
    pub p: usize,
    pub l: usize,
    pub reason: &'static str,
}

impl Geometry {
    pub fn new(k: usize, p: usize, l: usize) -> Result<Self, GeometryError> {
        let reason = if k == 0 {
            "need at least one GEM iteration"
        } else if p == 0 {
            "branch width must be positive"
        } else if l < 2 {
            "the head needs at least two layers"
        } else {
            return Ok(Self { k, p, l });
        };
        Err(GeometryError { k, p, l, reason })
    }

    pub fn embed_dim(&self) -> usize {
        3 * self.p
    }

    /// `(inputs, outputs)` of every head layer, in order.
    pub fn head_dims(&self) -> Vec<(usize, usize)> {
        let mut dims = vec![(3 * self.p, self.p)];
        dims.extend(std::iter::repeat_n((self.p, self.p), self.l - 2));
        dims.push((2 * self.p, 1));
        dims
    }
}

impl Default for Geometry {
    fn default() -> Self {
        Self { k: 3, p: 32, l: 4 }
    }
}

/// Affine map with a row-major `outputs x inputs` weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear<T> {
    pub inputs: usize,
    pub outputs: usize,
    pub weight: Vec<T>,
    pub bias: Vec<T>,
}

impl<T: Scalar> Linear<T> {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weight: vec![T::zero(); inputs * outputs],
            bias: vec![T::zero(); outputs],
        }
    }

    /// `out = W x + b`
    #[inline]
    pub fn apply(&self, x: &[T], out: &mut [T]) {
        debug_assert_eq!(x.len(), self.inputs);
        for (o, row) in self.weight.chunks_exact(self.inputs).enumerate() {
            out[o] = self.bias[o] + dot(row, x);
        }
    }

    /// `out += Wᵀ dy`
    #[inline]
    pub fn apply_transpose_add(&self, dy: &[T], out: &mut [T]) {
        for (row, &d) in self.weight.chunks_exact(self.inputs).zip(dy) {
            if d != T::zero() {
                for (o, &w) in out.iter_mut().zip(row) {
                    *o = *o + w * d;
                }
            }
        }
    }

    /// Accumulates `dW += dy xᵀ`, `db += dy`.
    #[inline]
    pub fn accumulate_grad(&mut self, dy: &[T], x: &[T]) {
        for ((row, b), &d) in self
            .weight
            .chunks_exact_mut(self.inputs)
            .zip(&mut self.bias)
            .zip(dy)
        {
            *b = *b + d;
            if d != T::zero() {
                for (w, &xi) in row.iter_mut().zip(x) {
                    *w = *w + d * xi;
                }
            }
        }
    }
}

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerNorm<T> {
    pub gamma: Vec<T>,
    pub beta: Vec<T>,
}

impl<T: Scalar> LayerNorm<T> {
    pub fn identity(dim: usize) -> Self {
        Self {
            gamma: vec![T::one(); dim],
            beta: vec![T::zero(); dim],
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            gamma: vec![T::zero(); dim],
            beta: vec![T::zero(); dim],
        }
    }
}

/// One GEM iteration: separate projections of the node itself, the sum over
/// its neighbours and the sum over its strict non-neighbours, followed by a
/// layer norm over the concatenation.
#[derive(Debug, Clone, PartialEq)]
pub struct GemLayer<T> {
    pub self_proj: Linear<T>,
    pub nbr_proj: Linear<T>,
    pub anti_proj: Linear<T>,
    pub norm: LayerNorm<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HiddenLayer<T> {
    pub linear: Linear<T>,
    pub norm: LayerNorm<T>,
}

/// Every learnable tensor of the graph scoring model.
#[derive(Debug, Clone, PartialEq)]
pub struct Params<T> {
    geometry: Geometry,
    pub gem: Vec<GemLayer<T>>,
    pub hidden: Vec<HiddenLayer<T>>,
    pub output: Linear<T>,
}

impl<T: Scalar> Params<T> {
    /// All tensors zero, layer-norm scales included.
    pub fn zeros(geometry: Geometry) -> Self {
        let (p, e) = (geometry.p, geometry.embed_dim());
        let gem = (0..geometry.k)
            .map(|_| GemLayer {
                self_proj: Linear::zeros(e, p),
                nbr_proj: Linear::zeros(e, p),
                anti_proj: Linear::zeros(e, p),
                norm: LayerNorm::zeros(e),
            })
            .collect();
        let dims = geometry.head_dims();
        let hidden = dims[..dims.len() - 1]
            .iter()
            .map(|&(i, o)| HiddenLayer {
                linear: Linear::zeros(i, o),
                norm: LayerNorm::zeros(o),
            })
            .collect();
        let (oi, oo) = dims[dims.len() - 1];
        Self {
            geometry,
            gem,
            hidden,
            output: Linear::zeros(oi, oo),
        }
    }

    /// Weights and biases uniform in `±1/sqrt(fan_in)`; layer norms start
    /// as the identity (scale 1, shift 0).
    pub fn init(geometry: Geometry, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = Self::zeros(geometry);
        let fill = |lin: &mut Linear<T>, rng: &mut ChaCha8Rng| {
            let bound = 1.0 / (lin.inputs as f64).sqrt();
            for w in lin.weight.iter_mut().chain(lin.bias.iter_mut()) {
                *w = T::lit(rng.gen_range(-bound..bound));
            }
        };
        for layer in &mut params.gem {
            fill(&mut layer.self_proj, &mut rng);
            fill(&mut layer.nbr_proj, &mut rng);
            fill(&mut layer.anti_proj, &mut rng);
            layer.norm = LayerNorm::identity(geometry.embed_dim());
        }
        for layer in &mut params.hidden {
            fill(&mut layer.linear, &mut rng);
            layer.norm = LayerNorm::identity(layer.linear.outputs);
        }
        fill(&mut params.output, &mut rng);
        params
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// Every tensor in the canonical order used by the weight file: per GEM
    /// iteration the self, neighbour and anti-neighbour weight/bias pairs and
    /// the norm scale/shift; per hidden layer weight, bias, scale, shift; then
    /// the output weight and bias.
    pub fn tensors(&self) -> Vec<(String, &[T])> {
        let mut out: Vec<(String, &[T])> = Vec::new();
        for (k, g) in self.gem.iter().enumerate() {
            out.push((format!("gem[{k}].self.weight"), &g.self_proj.weight));
            out.push((format!("gem[{k}].self.bias"), &g.self_proj.bias));
            out.push((format!("gem[{k}].nbr.weight"), &g.nbr_proj.weight));
            out.push((format!("gem[{k}].nbr.bias"), &g.nbr_proj.bias));
            out.push((format!("gem[{k}].anti.weight"), &g.anti_proj.weight));
            out.push((format!("gem[{k}].anti.bias"), &g.anti_proj.bias));
            out.push((format!("gem[{k}].norm.gamma"), &g.norm.gamma));
            out.push((format!("gem[{k}].norm.beta"), &g.norm.beta));
        }
        for (i, h) in self.hidden.iter().enumerate() {
            out.push((format!("head[{i}].weight"), &h.linear.weight));
            out.push((format!("head[{i}].bias"), &h.linear.bias));
            out.push((format!("head[{i}].norm.gamma"), &h.norm.gamma));
            out.push((format!("head[{i}].norm.beta"), &h.norm.beta));
        }
        out.push(("output.weight".into(), &self.output.weight));
        out.push(("output.bias".into(), &self.output.bias));
        out
    }

    /// Mutable views in the same order as [`Params::tensors`].
    pub fn tensors_mut(&mut self) -> Vec<&mut [T]> {
        let mut out: Vec<&mut [T]> = Vec::new();
        for g in &mut self.gem {
            out.push(&mut g.self_proj.weight);
            out.push(&mut g.self_proj.bias);
            out.push(&mut g.nbr_proj.weight);
            out.push(&mut g.nbr_proj.bias);
            out.push(&mut g.anti_proj.weight);
            out.push(&mut g.anti_proj.bias);
            out.push(&mut g.norm.gamma);
            out.push(&mut g.norm.beta);
        }
        for h in &mut self.hidden {
            out.push(&mut h.linear.weight);
            out.push(&mut h.linear.bias);
            out.push(&mut h.norm.gamma);
            out.push(&mut h.norm.beta);
        }
        out.push(&mut self.output.weight);
        out.push(&mut self.output.bias);
        out
    }

    pub fn num_params(&self) -> usize {
        self.tensors().iter().map(|(_, t)| t.len()).sum()
    }

    pub fn flatten(&self) -> Vec<T> {
        self.tensors()
            .into_iter()
            .flat_map(|(_, t)| t.iter().copied())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|(_, t)| t.iter().all(|x| x.is_finite()))
    }

    /// `self += scale * other`
    pub fn add_scaled(&mut self, other: &Params<T>, scale: T) {
        assert_eq!(self.geometry, other.geometry);
        for (dst, (_, src)) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = *d + scale * s;
            }
        }
    }

    pub fn scale(&mut self, factor: T) {
        for t in self.tensors_mut() {
            for x in t.iter_mut() {
                *x = *x * factor;
            }
        }
    }

    /// Converts every entry to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Params<U> {
        let mut out = Params::<U>::zeros(self.geometry);
        for (dst, (_, src)) in out.tensors_mut().into_iter().zip(self.tensors()) {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = U::from_f64_exact(s.to_f64_exact());
            }
        }
        out
    }
}
