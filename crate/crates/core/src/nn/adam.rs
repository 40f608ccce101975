use super::{Params, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First/second moment estimates and the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    pub first: Params<T>,
    pub second: Params<T>,
    pub step: u64,
    pub config: AdamConfig,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(like: &Params<T>, config: AdamConfig) -> Self {
        Self {
            first: Params::zeros(like.geometry()),
            second: Params::zeros(like.geometry()),
            step: 0,
            config,
        }
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step<T: Scalar>(
    params: &mut Params<T>,
    grads: &Params<T>,
    state: &mut AdamState<T>,
    lr: f64,
) {
    state.step += 1;
    let cfg = state.config;
    let (b1, b2) = (T::lit(cfg.beta1), T::lit(cfg.beta2));
    let t = state.step as i32;
    let c1 = T::one() - b1.powi(t);
    let c2 = T::one() - b2.powi(t);
    let (lr, eps) = (T::lit(lr), T::lit(cfg.eps));

    let grads = grads.tensors();
    let firsts = state.first.tensors_mut();
    let seconds = state.second.tensors_mut();
    for (((w, (_, g)), m), v) in params
        .tensors_mut()
        .into_iter()
        .zip(grads)
        .zip(firsts)
        .zip(seconds)
    {
        for i in 0..w.len() {
            m[i] = b1 * m[i] + (T::one() - b1) * g[i];
            v[i] = b2 * v[i] + (T::one() - b2) * g[i] * g[i];
            let m_hat = m[i] / c1;
            let v_hat = v[i] / c2;
            w[i] = w[i] - lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}
