use serde::{Deserialize, Serialize};

use super::model::{Gradients, GraphSageModel};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub t: u64,
    /// First/second moments, one per model parameter in `params()` order.
    pub m: Vec<Matrix>,
    pub v: Vec<Matrix>,
}

impl AdamState {
    pub fn new(model: &GraphSageModel, lr: f64) -> Self {
        let zeros: Vec<Matrix> = model
            .params()
            .iter()
            .map(|p| Matrix::zeros(p.rows(), p.cols()))
            .collect();
        Self {
            lr,
            beta1: ADAM_BETA1,
            beta2: ADAM_BETA2,
            eps: ADAM_EPS,
            t: 0,
            m: zeros.clone(),
            v: zeros,
        }
    }
}

/// One bias-corrected Adam update of `params` at step `t` (already
/// incremented, so `t ≥ 1`).
#[allow(clippy::too_many_arguments)]
pub fn adam_update(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    t: u64,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
) {
    let c1 = 1.0 - beta1.powf(t as f64);
    let c2 = 1.0 - beta2.powf(t as f64);
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        params[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + eps);
    }
}

pub fn adam_step(model: &mut GraphSageModel, grads: &Gradients, state: &mut AdamState) -> Result<()> {
    let grads = grads.as_array();
    let shapes_match = state.m.len() == 4
        && state.v.len() == 4
        && model.params().iter().zip(&grads).enumerate().all(|(i, (p, g))| {
            p.shape() == g.shape() && state.m[i].shape() == p.shape() && state.v[i].shape() == p.shape()
        });
    if !shapes_match {
        return Err(Error::shape("gradients and moments shaped like the model", "mismatch"));
    }
    state.t += 1;
    let (lr, b1, b2, eps, t) = (state.lr, state.beta1, state.beta2, state.eps, state.t);
    for (i, p) in model.params_mut().into_iter().enumerate() {
        adam_update(
            p.as_mut_slice(),
            grads[i].as_slice(),
            state.m[i].as_mut_slice(),
            state.v[i].as_mut_slice(),
            t,
            lr,
            b1,
            b2,
            eps,
        );
    }
    Ok(())
}
