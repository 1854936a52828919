//! First-order update rules: SGD/SGDM, vanilla Adam, and the decaying-momentum
//! variants of both.
//!
//! Every update is a deterministic transition on [`OptimizerState`] driven by
//! an externally supplied gradient and the per-step hyperparameters in
//! [`StepHyper`]. The SGDM recursion follows the two-line form
//!
//! ```text
//! theta_{t+1} = theta_t - eta g_t + beta_t v_t
//! v_{t+1}     = beta_t v_t - eta g_t
//! ```
//!
//! so the parameter change always equals the new velocity. The decaying-
//! momentum Adam variant keeps an accumulative first-order buffer
//! `m_t = g_t + beta_t m_{t-1}` with no `(1 - beta)` scaling and no bias
//! correction; the baseline [`adam_step`] applies standard bias correction to
//! both moments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedules::demon_beta;

/// Parameter vector plus momentum/second-moment buffers and a step counter.
///
/// All buffers share the parameter dimension. `v` is the SGDM velocity,
/// `second_moment` the elementwise EMA of squared gradients (Adam family),
/// and `m` the Adam-family first-order buffer. Snapshots serialize to JSON
/// with vectors as arrays of decimal floats for checkpoint/resume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState {
    pub theta: Vec<f64>,
    pub v: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub m: Vec<f64>,
    pub step: u64,
}

impl OptimizerState {
    /// Fresh state at `theta` with all buffers zeroed and `step = 0`.
    pub fn new(theta: Vec<f64>) -> Self {
        let dim = theta.len();
        OptimizerState {
            theta,
            v: vec![0.0; dim],
            second_moment: vec![0.0; dim],
            m: vec![0.0; dim],
            step: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }
}

/// Hyperparameters for a single update call.
///
/// `beta` is the already-scheduled momentum coefficient for this step
/// (`beta_1` for the Adam family); `beta2` and `epsilon` only matter to the
/// Adam family; `weight_decay` is a coupled L2 coefficient added to the
/// gradient before the update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepHyper {
    pub eta: f64,
    pub beta: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub weight_decay: f64,
}

impl Default for StepHyper {
    fn default() -> Self {
        StepHyper {
            eta: 0.001,
            beta: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            weight_decay: 0.0,
        }
    }
}

impl StepHyper {
    pub fn new(eta: f64, beta: f64) -> Self {
        StepHyper {
            eta,
            beta,
            ..StepHyper::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::domain(format!("eta = {} must be finite and > 0", self.eta)));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(Error::domain(format!("beta = {} outside [0, 1)", self.beta)));
        }
        if !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::domain(format!("beta2 = {} outside [0, 1)", self.beta2)));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::domain("epsilon must be finite and > 0"));
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return Err(Error::domain("weight_decay must be finite and >= 0"));
        }
        Ok(())
    }
}

fn check_gradient_input(state: &OptimizerState, g: &[f64]) -> Result<()> {
    if g.len() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            got: g.len(),
        });
    }
    if g.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteGradient { step: state.step });
    }
    Ok(())
}

/// Coupled L2: returns `g + lambda * theta`.
pub fn apply_weight_decay(g: &[f64], theta: &[f64], lambda: f64) -> Vec<f64> {
    assert_eq!(g.len(), theta.len(), "weight decay dimension mismatch");
    g.iter()
        .zip(theta)
        .map(|(gi, ti)| gi + lambda * ti)
        .collect()
}

/// One SGDM update with an externally scheduled momentum coefficient.
///
/// Constant `beta` recovers plain SGDM; `beta = 0` recovers SGD.
pub fn sgdm_step(state: &mut OptimizerState, g: &[f64], h: &StepHyper) -> Result<()> {
    h.validate()?;
    check_gradient_input(state, g)?;
    for i in 0..state.dim() {
        let gi = g[i] + h.weight_decay * state.theta[i];
        let theta_next = state.theta[i] - h.eta * gi + h.beta * state.v[i];
        let v_next = h.beta * state.v[i] - h.eta * gi;
        state.theta[i] = theta_next;
        state.v[i] = v_next;
    }
    state.step += 1;
    Ok(())
}

/// One decaying-momentum SGDM update: computes `beta_t` from
/// `(t, total, beta_init)` and delegates to [`sgdm_step`].
pub fn demon_sgdm_step(
    state: &mut OptimizerState,
    g: &[f64],
    eta: f64,
    beta_init: f64,
    t: usize,
    total: usize,
    extras: &StepHyper,
) -> Result<()> {
    if t >= total {
        return Err(Error::domain(format!("t = {t} must satisfy t < total = {total}")));
    }
    let beta_t = demon_beta(t as f64, total as f64, beta_init)?;
    let h = StepHyper {
        eta,
        beta: beta_t,
        ..*extras
    };
    sgdm_step(state, g, &h)
}

/// One decaying-momentum Adam update.
///
/// Order per step: `beta_t` from the decay rule, second-moment EMA,
/// accumulative momentum `m_t = g_t + beta_t m_{t-1}`, then the elementwise
/// preconditioned parameter update with `epsilon` inside the square root.
/// With `beta_init = 0` the rule collapses to a non-accumulative
/// AdaGrad-style update.
pub fn demon_adam_step(
    state: &mut OptimizerState,
    g: &[f64],
    eta: f64,
    beta_init: f64,
    t: usize,
    total: usize,
    h: &StepHyper,
) -> Result<()> {
    if t >= total {
        return Err(Error::domain(format!("t = {t} must satisfy t < total = {total}")));
    }
    let beta_t = demon_beta(t as f64, total as f64, beta_init)?;
    let h = StepHyper {
        eta,
        beta: beta_t,
        ..*h
    };
    h.validate()?;
    check_gradient_input(state, g)?;
    for i in 0..state.dim() {
        let gi = g[i] + h.weight_decay * state.theta[i];
        let e_next = h.beta2 * state.second_moment[i] + (1.0 - h.beta2) * gi * gi;
        let m_next = gi + h.beta * state.m[i];
        state.second_moment[i] = e_next;
        state.m[i] = m_next;
        state.theta[i] -= h.eta / (e_next + h.epsilon).sqrt() * m_next;
    }
    state.step += 1;
    Ok(())
}

/// One standard Adam update with bias correction on both moments.
///
/// `h.beta` plays the role of `beta_1`.
pub fn adam_step(state: &mut OptimizerState, g: &[f64], h: &StepHyper) -> Result<()> {
    h.validate()?;
    check_gradient_input(state, g)?;
    let t = state.step + 1;
    let corr1 = 1.0 - h.beta.powi(t as i32);
    let corr2 = 1.0 - h.beta2.powi(t as i32);
    for i in 0..state.dim() {
        let gi = g[i] + h.weight_decay * state.theta[i];
        let m_next = h.beta * state.m[i] + (1.0 - h.beta) * gi;
        let e_next = h.beta2 * state.second_moment[i] + (1.0 - h.beta2) * gi * gi;
        state.m[i] = m_next;
        state.second_moment[i] = e_next;
        let m_hat = m_next / corr1;
        let e_hat = e_next / corr2;
        state.theta[i] -= h.eta * m_hat / (e_hat.sqrt() + h.epsilon);
    }
    state.step += 1;
    Ok(())
}
