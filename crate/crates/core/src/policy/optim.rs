//! Adam with global-norm gradient clipping and a staircase learning-rate decay.

use serde::{Deserialize, Serialize};

use super::PolicyError;

/// `lr(t) = initial · rate^⌊t / every⌋`, with `t` the number of completed updates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LrSchedule {
    pub initial: f64,
    pub decay_rate: f64,
    pub decay_every: u64,
}

impl Default for LrSchedule {
    fn default() -> Self {
        Self {
            initial: 1e-3,
            decay_rate: 0.96,
            decay_every: 5000,
        }
    }
}

impl LrSchedule {
    pub fn lr_at(&self, completed_steps: u64) -> f64 {
        let stage = completed_steps / self.decay_every.max(1);
        self.initial * self.decay_rate.powi(stage as i32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// Completed updates.
    pub step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: vec![0.0; len],
            v: vec![0.0; len],
        }
    }
}

/// What one update actually did.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInfo {
    pub lr: f64,
    pub grad_norm: f64,
    /// Norm of the gradient after clipping.
    pub applied_norm: f64,
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Scales `grad` in place so its L2 norm is at most `max_norm`; returns the original norm.
pub fn clip_global_norm(grad: &mut [f64], max_norm: f64) -> f64 {
    let norm = l2_norm(grad);
    if norm > max_norm && norm > 0.0 {
        let scale = max_norm / norm;
        grad.iter_mut().for_each(|g| *g *= scale);
    }
    norm
}

/// One bias-corrected Adam update minimizing the objective whose gradient is `gradient`.
pub fn adam_step(
    state: &mut AdamState,
    params: &mut [f64],
    gradient: &[f64],
    schedule: &LrSchedule,
    clip: Option<f64>,
) -> Result<StepInfo, PolicyError> {
    if params.len() != gradient.len() || state.m.len() != params.len() {
        return Err(PolicyError::ShapeMismatch {
            expected: params.len(),
            found: gradient.len(),
        });
    }
    if gradient.iter().any(|g| !g.is_finite()) {
        return Err(PolicyError::NumericalFault);
    }
    let mut g = gradient.to_vec();
    let grad_norm = match clip {
        Some(c) => clip_global_norm(&mut g, c),
        None => l2_norm(&g),
    };
    let lr = schedule.lr_at(state.step);
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - state.beta1.powi(t);
    let bc2 = 1.0 - state.beta2.powi(t);
    for i in 0..params.len() {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g[i] * g[i];
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + state.eps);
    }
    Ok(StepInfo {
        lr,
        grad_norm,
        applied_norm: l2_norm(&g),
    })
}
