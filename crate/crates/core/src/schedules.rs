//! Learning-rate and momentum schedules.
//!
//! Every family is evaluated as a pure function of the iteration index `t`,
//! the horizon `total`, and the parameters carried by [`ScheduleSpec`].
//! Schedules are indexed per iteration, not per epoch; the plateau family is
//! the one exception, holding its value in a [`PlateauState`] that callers
//! advance once per epoch with a validation metric.
//!
//! The decaying-momentum rule lives in [`demon_beta`]: it drives the momentum
//! coefficient from `beta_init` at `t = 0` to exactly `0` at `t = total` so
//! that the cumulative contribution of each gradient to future updates decays
//! linearly with the fraction of iterations remaining.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which hyperparameter a schedule drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleTarget {
    LearningRate,
    Momentum,
}

/// Schedule family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Constant,
    Demon,
    Cosine,
    Linear,
    Step,
    Exponential,
    OneCycle,
    Plateau,
    DemonTheory,
}

/// Declarative description of one learning-rate or momentum schedule.
///
/// Field meaning varies by family: `init_value` is the peak / starting value
/// (`gamma_max` or `beta_init`), `min_value` the floor (`gamma_min`, the
/// OneCycle floor or `beta_min`), `milestones` the step-schedule drop points
/// as fractions of the horizon, `factor` the step/plateau multiplier, `k` the
/// exponential rate (when absent the rate defaults to
/// [`default_exponential_k`]), and `patience` the plateau epoch budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub kind: ScheduleKind,
    pub init_value: f64,
    #[serde(default)]
    pub min_value: f64,
    #[serde(default)]
    pub milestones: Vec<f64>,
    #[serde(default = "default_factor")]
    pub factor: f64,
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(default = "default_patience")]
    pub patience: usize,
    pub target: ScheduleTarget,
}

fn default_factor() -> f64 {
    0.1
}

fn default_patience() -> usize {
    5
}

impl ScheduleSpec {
    pub fn constant(value: f64, target: ScheduleTarget) -> Self {
        ScheduleSpec {
            kind: ScheduleKind::Constant,
            init_value: value,
            min_value: 0.0,
            milestones: Vec::new(),
            factor: default_factor(),
            k: None,
            patience: default_patience(),
            target,
        }
    }

    /// Decaying-momentum schedule from `beta_init` down to 0.
    pub fn demon(beta_init: f64) -> Self {
        ScheduleSpec {
            kind: ScheduleKind::Demon,
            init_value: beta_init,
            ..ScheduleSpec::constant(beta_init, ScheduleTarget::Momentum)
        }
    }

    pub fn cosine(gamma_max: f64, gamma_min: f64, target: ScheduleTarget) -> Self {
        ScheduleSpec {
            kind: ScheduleKind::Cosine,
            min_value: gamma_min,
            ..ScheduleSpec::constant(gamma_max, target)
        }
    }

    pub fn linear(gamma_init: f64, target: ScheduleTarget) -> Self {
        ScheduleSpec {
            kind: ScheduleKind::Linear,
            ..ScheduleSpec::constant(gamma_init, target)
        }
    }

    pub fn step(gamma_init: f64, milestones: Vec<f64>, factor: f64, target: ScheduleTarget) -> Self {
        ScheduleSpec {
            kind: ScheduleKind::Step,
            milestones,
            factor,
            ..ScheduleSpec::constant(gamma_init, target)
        }
    }

    pub fn exponential(gamma_init: f64, k: Option<f64>, target: ScheduleTarget) -> Self {
        ScheduleSpec {
            kind: ScheduleKind::Exponential,
            k,
            ..ScheduleSpec::constant(gamma_init, target)
        }
    }

    pub fn onecycle(peak: f64, floor: f64, target: ScheduleTarget) -> Self {
        ScheduleSpec {
            kind: ScheduleKind::OneCycle,
            min_value: floor,
            ..ScheduleSpec::constant(peak, target)
        }
    }

    pub fn plateau(init: f64, factor: f64, patience: usize, target: ScheduleTarget) -> Self {
        ScheduleSpec {
            kind: ScheduleKind::Plateau,
            factor,
            patience,
            ..ScheduleSpec::constant(init, target)
        }
    }

    /// The momentum schedule of the convex convergence bound,
    /// `beta_t = (1/t) * (t+1)/(t+2)`.
    pub fn demon_theory() -> Self {
        ScheduleSpec {
            kind: ScheduleKind::DemonTheory,
            init_value: 2.0 / 3.0,
            ..ScheduleSpec::constant(2.0 / 3.0, ScheduleTarget::Momentum)
        }
    }

    /// Check the type invariants.
    pub fn validate(&self) -> Result<()> {
        if !self.init_value.is_finite() || self.init_value < 0.0 {
            return Err(Error::domain("init_value must be finite and >= 0"));
        }
        if !self.min_value.is_finite() || self.min_value < 0.0 {
            return Err(Error::domain("min_value must be finite and >= 0"));
        }
        if self.min_value > self.init_value {
            return Err(Error::domain(format!(
                "min_value {} exceeds init_value {}",
                self.min_value, self.init_value
            )));
        }
        let mut prev = 0.0;
        for &m in &self.milestones {
            if !(m > 0.0 && m < 1.0) {
                return Err(Error::domain(format!("milestone {m} outside (0, 1)")));
            }
            if m <= prev {
                return Err(Error::domain("milestones must be strictly increasing"));
            }
            prev = m;
        }
        if matches!(self.kind, ScheduleKind::Step | ScheduleKind::Plateau)
            && !(self.factor > 0.0 && self.factor < 1.0)
        {
            return Err(Error::domain(format!("factor {} outside (0, 1)", self.factor)));
        }
        if self.kind == ScheduleKind::Plateau && self.patience == 0 {
            return Err(Error::domain("patience must be a positive integer"));
        }
        if matches!(self.kind, ScheduleKind::Demon | ScheduleKind::DemonTheory) {
            if self.target != ScheduleTarget::Momentum {
                return Err(Error::domain(
                    "demon schedules are valid only with target = momentum",
                ));
            }
            if self.init_value >= 1.0 {
                return Err(Error::domain("demon requires init_value < 1"));
            }
        }
        if let Some(k) = self.k {
            if !k.is_finite() {
                return Err(Error::domain("k must be finite"));
            }
        }
        Ok(())
    }
}

/// Running state of the decay-on-plateau schedule.
///
/// `current_value` only ever changes by exact multiplication by the decay
/// factor, so it always equals `init * factor^d` for some integer `d >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateauState {
    pub current_value: f64,
    pub best_metric: f64,
    pub epochs_since_improvement: usize,
}

impl PlateauState {
    pub fn new(init_value: f64) -> Self {
        PlateauState {
            current_value: init_value,
            best_metric: f64::INFINITY,
            epochs_since_improvement: 0,
        }
    }
}

fn check_range(t: f64, total: f64) -> Result<()> {
    if !t.is_finite() || !total.is_finite() {
        return Err(Error::domain("t and total must be finite"));
    }
    if total < 1.0 {
        return Err(Error::domain("total iterations must be >= 1"));
    }
    if t < 0.0 || t > total {
        return Err(Error::domain(format!("t = {t} outside [0, {total}]")));
    }
    Ok(())
}

/// Decaying-momentum coefficient at iteration `t` of `total`.
///
/// Returns `beta_init * p / ((1 - beta_init) + beta_init * p)` where
/// `p = (total - t) / total` is the proportion of iterations remaining. The
/// value equals `beta_init` exactly at `t = 0` and `0` exactly at
/// `t = total`, and is non-increasing in `t`.
pub fn demon_beta(t: f64, total: f64, beta_init: f64) -> Result<f64> {
    check_range(t, total)?;
    if !(0.0..1.0).contains(&beta_init) {
        return Err(Error::domain(format!("beta_init = {beta_init} outside [0, 1)")));
    }
    let p = (total - t) / total;
    Ok(beta_init * (p / ((1.0 - beta_init) + beta_init * p)))
}

/// Cosine decay from `gamma_max` at `t = 0` to `gamma_min` at `t = total`.
///
/// Endpoints are returned exactly; interior values follow
/// `gamma_min + 0.5 (gamma_max - gamma_min)(1 + cos(pi t / total))`.
pub fn cosine_value(t: f64, total: f64, gamma_max: f64, gamma_min: f64) -> Result<f64> {
    check_range(t, total)?;
    if gamma_min > gamma_max {
        return Err(Error::domain(format!(
            "gamma_min {gamma_min} exceeds gamma_max {gamma_max}"
        )));
    }
    if t == 0.0 {
        return Ok(gamma_max);
    }
    if t == total {
        return Ok(gamma_min);
    }
    let raw = gamma_min
        + 0.5 * (gamma_max - gamma_min) * (1.0 + (std::f64::consts::PI * t / total).cos());
    Ok(raw.clamp(gamma_min, gamma_max))
}

/// Linear decay `gamma_init * (1 - t/total)`, reaching exactly 0 at the end.
pub fn linear_value(t: f64, total: f64, gamma_init: f64) -> Result<f64> {
    check_range(t, total)?;
    Ok(gamma_init * (1.0 - t / total))
}

/// Piecewise-constant decay: multiply by `factor` at each milestone fraction.
///
/// A milestone `m` converts to the iteration `round_ties_even(m * total)`;
/// the value at `t` is `gamma_init * factor^(milestones passed)`.
pub fn step_value(
    t: f64,
    total: f64,
    gamma_init: f64,
    milestones: &[f64],
    factor: f64,
) -> Result<f64> {
    check_range(t, total)?;
    if !(factor > 0.0 && factor < 1.0) {
        return Err(Error::domain(format!("factor {factor} outside (0, 1)")));
    }
    let mut prev = 0.0;
    for &m in milestones {
        if !(m > 0.0 && m < 1.0) || m <= prev {
            return Err(Error::domain(
                "milestones must be strictly increasing and inside (0, 1)",
            ));
        }
        prev = m;
    }
    let drops = milestones
        .iter()
        .filter(|&&m| t >= (m * total).round_ties_even())
        .count();
    Ok(gamma_init * factor.powi(drops as i32))
}

/// Default exponential rate, `-0.05 * (100 / total)`.
pub fn default_exponential_k(total: f64) -> f64 {
    -0.05 * (100.0 / total)
}

/// Exponential schedule `gamma_init * exp(k t)`.
pub fn exponential_value(t: f64, gamma_init: f64, k: f64) -> f64 {
    gamma_init * (k * t).exp()
}

/// Linear interpolation that is exact at both endpoints.
fn lerp(a: f64, b: f64, w: f64) -> f64 {
    (1.0 - w) * a + w * b
}

/// Triangular OneCycle schedule over two equal phases.
///
/// For a learning-rate target the value rises `floor -> peak` over the first
/// half and falls back over the second; a momentum target is mirrored
/// (`peak -> floor -> peak`).
pub fn onecycle_value(
    t: f64,
    total: f64,
    peak: f64,
    floor: f64,
    target: ScheduleTarget,
) -> Result<f64> {
    check_range(t, total)?;
    if floor > peak {
        return Err(Error::domain(format!("floor {floor} exceeds peak {peak}")));
    }
    let half = total / 2.0;
    let (lo, hi) = match target {
        ScheduleTarget::LearningRate => (floor, peak),
        ScheduleTarget::Momentum => (peak, floor),
    };
    let value = if t <= half {
        lerp(lo, hi, t / half)
    } else {
        lerp(hi, lo, (t - half) / half)
    };
    Ok(value)
}

/// Advance a plateau schedule by one epoch of validation feedback.
///
/// A strict improvement resets the counter and records the new best; any
/// other outcome increments the counter, and once the counter exceeds
/// `patience` the value is multiplied by `factor` and the counter resets.
pub fn plateau_update(
    state: &PlateauState,
    val_metric: f64,
    patience: usize,
    factor: f64,
) -> Result<PlateauState> {
    if !val_metric.is_finite() {
        return Err(Error::NonFinite(format!(
            "plateau validation metric {val_metric}"
        )));
    }
    if !(factor > 0.0 && factor < 1.0) {
        return Err(Error::domain(format!("factor {factor} outside (0, 1)")));
    }
    if patience == 0 {
        return Err(Error::domain("patience must be a positive integer"));
    }
    let mut next = *state;
    if val_metric < state.best_metric {
        next.best_metric = val_metric;
        next.epochs_since_improvement = 0;
    } else {
        next.epochs_since_improvement += 1;
        if next.epochs_since_improvement > patience {
            next.current_value *= factor;
            next.epochs_since_improvement = 0;
        }
    }
    Ok(next)
}

/// Momentum schedule of the convergence bound: `(t+1) / (t (t+2))` for `t >= 1`.
pub fn demon_theory_beta(t: f64) -> Result<f64> {
    if !t.is_finite() || t < 1.0 {
        return Err(Error::domain(format!("demon_theory_beta requires t >= 1, got {t}")));
    }
    Ok((t + 1.0) / (t * (t + 2.0)))
}

/// Evaluate any schedule family at iteration `t` of `total`.
///
/// The plateau family needs its [`PlateauState`]; no other family accepts
/// one. The exponential rate falls back to [`default_exponential_k`] when
/// `spec.k` is unset.
pub fn schedule_eval(
    spec: &ScheduleSpec,
    t: f64,
    total: f64,
    plateau: Option<&PlateauState>,
) -> Result<f64> {
    spec.validate()?;
    if spec.kind != ScheduleKind::Plateau && plateau.is_some() {
        return Err(Error::domain(
            "plateau state supplied to a non-plateau schedule",
        ));
    }
    match spec.kind {
        ScheduleKind::Constant => {
            check_range(t, total)?;
            Ok(spec.init_value)
        }
        ScheduleKind::Demon => demon_beta(t, total, spec.init_value),
        ScheduleKind::Cosine => cosine_value(t, total, spec.init_value, spec.min_value),
        ScheduleKind::Linear => linear_value(t, total, spec.init_value),
        ScheduleKind::Step => {
            step_value(t, total, spec.init_value, &spec.milestones, spec.factor)
        }
        ScheduleKind::Exponential => {
            check_range(t, total)?;
            let k = spec.k.unwrap_or_else(|| default_exponential_k(total));
            Ok(exponential_value(t, spec.init_value, k))
        }
        ScheduleKind::OneCycle => {
            onecycle_value(t, total, spec.init_value, spec.min_value, spec.target)
        }
        ScheduleKind::Plateau => {
            check_range(t, total)?;
            let state = plateau.ok_or_else(|| {
                Error::domain("plateau schedule requires a PlateauState")
            })?;
            Ok(state.current_value)
        }
        ScheduleKind::DemonTheory => demon_theory_beta(t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demon_endpoints_exact() {
        assert_eq!(demon_beta(0.0, 100.0, 0.9).unwrap(), 0.9);
        assert_eq!(demon_beta(100.0, 100.0, 0.9).unwrap(), 0.0);
        assert_eq!(demon_beta(0.0, 7.0, 0.0).unwrap(), 0.0);
        assert_eq!(demon_beta(3.0, 7.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn demon_midpoint_hand_value() {
        // beta_init 0.9 halfway: 0.45 / 0.55
        let b = demon_beta(50.0, 100.0, 0.9).unwrap();
        assert!((b - 0.45 / 0.55).abs() < 1e-15, "{b}");
    }

    #[test]
    fn demon_rejects_bad_domain() {
        assert!(demon_beta(0.0, 100.0, 1.0).is_err());
        assert!(demon_beta(101.0, 100.0, 0.9).is_err());
        assert!(demon_beta(-1.0, 100.0, 0.9).is_err());
        assert!(demon_beta(0.0, 0.0, 0.9).is_err());
    }

    #[test]
    fn demon_balance_identity() {
        // beta/(1-beta) == (1 - t/T) * beta_init/(1 - beta_init)
        let beta_init = 0.95;
        let total = 321.0;
        for t in 0..=320 {
            let t = t as f64;
            let beta = demon_beta(t, total, beta_init).unwrap();
            let lhs = beta / (1.0 - beta);
            let rhs = (1.0 - t / total) * beta_init / (1.0 - beta_init);
            let denom = rhs.abs().max(1e-300);
            assert!((lhs - rhs).abs() / denom < 1e-12, "t={t} lhs={lhs} rhs={rhs}");
        }
    }

    #[test]
    fn demon_non_increasing() {
        let mut prev = f64::INFINITY;
        for t in 0..=500 {
            let b = demon_beta(t as f64, 500.0, 0.97).unwrap();
            assert!(b <= prev);
            assert!((0.0..=0.97).contains(&b));
            prev = b;
        }
    }

    #[test]
    fn cosine_endpoints_and_midpoint() {
        assert_eq!(cosine_value(0.0, 10.0, 0.1, 0.0).unwrap(), 0.1);
        assert_eq!(cosine_value(10.0, 10.0, 0.1, 0.0).unwrap(), 0.0);
        let mid = cosine_value(5.0, 10.0, 0.1, 0.0).unwrap();
        assert!((mid - 0.05).abs() < 1e-15);
        assert!(cosine_value(1.0, 10.0, 0.1, 0.2).is_err());
    }

    #[test]
    fn cosine_matches_linear_at_endpoints() {
        let (t0, tt) = (0.0, 64.0);
        assert_eq!(
            cosine_value(t0, tt, 0.3, 0.0).unwrap(),
            linear_value(t0, tt, 0.3).unwrap()
        );
        assert_eq!(
            cosine_value(tt, tt, 0.3, 0.0).unwrap(),
            linear_value(tt, tt, 0.3).unwrap()
        );
    }

    #[test]
    fn linear_values() {
        assert_eq!(linear_value(0.0, 100.0, 0.3).unwrap(), 0.3);
        assert_eq!(linear_value(100.0, 100.0, 0.3).unwrap(), 0.0);
        let v = linear_value(25.0, 100.0, 0.3).unwrap();
        assert!((v - 0.225).abs() < 1e-15);
    }

    #[test]
    fn step_drop_schedule() {
        let ms = [0.5, 0.75];
        assert_eq!(step_value(0.0, 100.0, 0.1, &ms, 0.1).unwrap(), 0.1);
        let at_half = step_value(50.0, 100.0, 0.1, &ms, 0.1).unwrap();
        assert!((at_half - 0.01).abs() < 1e-17);
        let late = step_value(80.0, 100.0, 0.1, &ms, 0.1).unwrap();
        assert!((late - 0.001).abs() < 1e-18);
        assert!(step_value(0.0, 100.0, 0.1, &[0.75, 0.5], 0.1).is_err());
    }

    #[test]
    fn step_has_exactly_len_drops() {
        let ms = [0.2, 0.4, 0.9];
        let mut drops = 0;
        let mut prev = step_value(0.0, 50.0, 1.0, &ms, 0.5).unwrap();
        for t in 1..=50 {
            let v = step_value(t as f64, 50.0, 1.0, &ms, 0.5).unwrap();
            assert!(v <= prev);
            if v < prev {
                drops += 1;
            }
            prev = v;
        }
        assert_eq!(drops, ms.len());
    }

    #[test]
    fn exponential_values() {
        assert_eq!(exponential_value(0.0, 0.1, -0.3), 0.1);
        let v = exponential_value(100.0, 1.0, -0.05);
        assert!((v - (-5.0f64).exp()).abs() < 1e-15);
        let v = exponential_value(20.0, 1.0, -0.05);
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(default_exponential_k(100.0), -0.05);
        assert_eq!(default_exponential_k(200.0), -0.025);
    }

    #[test]
    fn onecycle_learning_rate_triangle() {
        let peak = onecycle_value(50.0, 100.0, 1.0, 0.1, ScheduleTarget::LearningRate).unwrap();
        assert_eq!(peak, 1.0);
        let rising = onecycle_value(25.0, 100.0, 1.0, 0.1, ScheduleTarget::LearningRate).unwrap();
        assert!((rising - 0.55).abs() < 1e-15);
        assert_eq!(
            onecycle_value(0.0, 100.0, 1.0, 0.1, ScheduleTarget::LearningRate).unwrap(),
            0.1
        );
        assert_eq!(
            onecycle_value(100.0, 100.0, 1.0, 0.1, ScheduleTarget::LearningRate).unwrap(),
            0.1
        );
        assert!(onecycle_value(0.0, 100.0, 0.1, 1.0, ScheduleTarget::LearningRate).is_err());
    }

    #[test]
    fn onecycle_momentum_starts_at_peak() {
        let v = onecycle_value(0.0, 100.0, 0.95, 0.85, ScheduleTarget::Momentum).unwrap();
        assert_eq!(v, 0.95);
        let mid = onecycle_value(50.0, 100.0, 0.95, 0.85, ScheduleTarget::Momentum).unwrap();
        assert_eq!(mid, 0.85);
    }

    #[test]
    fn onecycle_lr_and_momentum_mirror() {
        // lr rises exactly when momentum falls and vice versa
        for t in 0..100 {
            let (t0, t1) = (t as f64, (t + 1) as f64);
            let lr0 = onecycle_value(t0, 100.0, 1.0, 0.1, ScheduleTarget::LearningRate).unwrap();
            let lr1 = onecycle_value(t1, 100.0, 1.0, 0.1, ScheduleTarget::LearningRate).unwrap();
            let m0 = onecycle_value(t0, 100.0, 0.95, 0.85, ScheduleTarget::Momentum).unwrap();
            let m1 = onecycle_value(t1, 100.0, 0.95, 0.85, ScheduleTarget::Momentum).unwrap();
            assert!((lr1 > lr0) == (m1 < m0), "t={t}");
        }
    }

    #[test]
    fn plateau_improvement_resets() {
        let state = PlateauState {
            current_value: 0.1,
            best_metric: 1.0,
            epochs_since_improvement: 0,
        };
        let next = plateau_update(&state, 0.9, 5, 0.1).unwrap();
        assert_eq!(next.current_value, 0.1);
        assert_eq!(next.best_metric, 0.9);
        assert_eq!(next.epochs_since_improvement, 0);
    }

    #[test]
    fn plateau_decays_after_patience() {
        let state = PlateauState {
            current_value: 0.1,
            best_metric: 0.9,
            epochs_since_improvement: 5,
        };
        let next = plateau_update(&state, 0.95, 5, 0.1).unwrap();
        assert!((next.current_value - 0.01).abs() < 1e-17);
        assert_eq!(next.best_metric, 0.9);
        assert_eq!(next.epochs_since_improvement, 0);
    }

    #[test]
    fn plateau_below_patience_keeps_value() {
        let mut state = PlateauState::new(0.1);
        state = plateau_update(&state, 1.0, 5, 0.1).unwrap(); // first metric becomes best
        for _ in 0..3 {
            state = plateau_update(&state, 2.0, 5, 0.1).unwrap();
        }
        assert_eq!(state.current_value, 0.1);
        assert_eq!(state.epochs_since_improvement, 3);
        assert!(plateau_update(&state, f64::NAN, 5, 0.1).is_err());
    }

    #[test]
    fn demon_theory_values() {
        let b1 = demon_theory_beta(1.0).unwrap();
        assert_eq!(b1, 2.0 / 3.0);
        let b2 = demon_theory_beta(2.0).unwrap();
        assert_eq!(b2, 3.0 / 8.0);
        assert!(demon_theory_beta(0.0).is_err());
        // approaches zero
        assert!(demon_theory_beta(1e9).unwrap() < 1e-8);
        // t * (t+2) * beta == t + 1
        for t in 1..200 {
            let t = t as f64;
            let b = demon_theory_beta(t).unwrap();
            assert!((b * t * (t + 2.0) - (t + 1.0)).abs() / (t + 1.0) < 1e-12);
        }
    }

    #[test]
    fn demon_theory_strictly_decreasing() {
        let mut prev = f64::INFINITY;
        for t in 1..=1000 {
            let b = demon_theory_beta(t as f64).unwrap();
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn eval_dispatches() {
        let c = ScheduleSpec::constant(0.9, ScheduleTarget::Momentum);
        assert_eq!(schedule_eval(&c, 17.0, 100.0, None).unwrap(), 0.9);

        let d = ScheduleSpec::demon(0.95);
        assert_eq!(schedule_eval(&d, 0.0, 100.0, None).unwrap(), 0.95);

        let l = ScheduleSpec::linear(0.1, ScheduleTarget::LearningRate);
        assert_eq!(schedule_eval(&l, 100.0, 100.0, None).unwrap(), 0.0);

        let p = ScheduleSpec::plateau(0.1, 0.1, 5, ScheduleTarget::LearningRate);
        assert!(schedule_eval(&p, 0.0, 100.0, None).is_err());
        let st = PlateauState::new(0.1);
        assert_eq!(schedule_eval(&p, 0.0, 100.0, Some(&st)).unwrap(), 0.1);
        // plateau state rejected elsewhere
        assert!(schedule_eval(&c, 0.0, 100.0, Some(&st)).is_err());
    }

    #[test]
    fn spec_validation() {
        let mut s = ScheduleSpec::demon(0.9);
        s.target = ScheduleTarget::LearningRate;
        assert!(s.validate().is_err());

        let mut s = ScheduleSpec::demon(1.0);
        assert!(s.validate().is_err());
        s.init_value = 0.9;
        assert!(s.validate().is_ok());

        let s = ScheduleSpec::step(0.1, vec![0.5, 0.25], 0.1, ScheduleTarget::LearningRate);
        assert!(s.validate().is_err());

        let mut s = ScheduleSpec::cosine(0.1, 0.3, ScheduleTarget::LearningRate);
        assert!(s.validate().is_err());
        s.min_value = 0.0;
        assert!(s.validate().is_ok());
    }

    #[test]
    fn spec_serde_rejects_unknown_fields() {
        let json = r#"{"kind":"demon","init_value":0.9,"target":"momentum"}"#;
        let spec: ScheduleSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.kind, ScheduleKind::Demon);
        assert_eq!(spec.factor, 0.1);

        let bad = r#"{"kind":"demon","init_value":0.9,"target":"momentum","bogus":1}"#;
        let err = serde_json::from_str::<ScheduleSpec>(bad).unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn spec_serde_round_trip() {
        let spec = ScheduleSpec::step(0.3, vec![0.5, 0.75], 0.2, ScheduleTarget::LearningRate);
        let json = serde_json::to_string(&spec).unwrap();
        let back: ScheduleSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn demon_monotone_and_bounded(
                beta_init in 0.0f64..0.999,
                total in 1u32..2000,
            ) {
                let total = f64::from(total);
                let mut prev = f64::INFINITY;
                for i in 0..=100 {
                    let t = total * f64::from(i) / 100.0;
                    let b = demon_beta(t, total, beta_init).unwrap();
                    prop_assert!(b <= prev + 0.0);
                    prop_assert!((0.0..=beta_init).contains(&b));
                    prev = b;
                }
                prop_assert_eq!(demon_beta(0.0, total, beta_init).unwrap(), beta_init);
                prop_assert_eq!(demon_beta(total, total, beta_init).unwrap(), 0.0);
            }

            #[test]
            fn demon_balance_holds(
                beta_init in 0.0f64..0.99,
                total in 2u32..5000,
                frac in 0.0f64..1.0,
            ) {
                let total = f64::from(total);
                let t = (frac * total).floor();
                let b = demon_beta(t, total, beta_init).unwrap();
                prop_assume!(b < 1.0);
                let lhs = b / (1.0 - b);
                let rhs = (1.0 - t / total) * beta_init / (1.0 - beta_init);
                let denom = rhs.abs().max(1e-300);
                prop_assert!((lhs - rhs).abs() / denom <= 1e-12 || (lhs - rhs).abs() < 1e-300);
            }

            #[test]
            fn plateau_value_only_scales_by_factor(
                metrics in proptest::collection::vec(0.0f64..10.0, 1..40),
                patience in 1usize..6,
            ) {
                let init = 0.1;
                let factor = 0.5;
                let mut state = PlateauState::new(init);
                let mut decays = 0u32;
                for m in metrics {
                    let next = plateau_update(&state, m, patience, factor).unwrap();
                    if next.current_value != state.current_value {
                        prop_assert_eq!(next.current_value, state.current_value * factor);
                        decays += 1;
                    }
                    state = next;
                }
                prop_assert!((state.current_value - init * factor.powi(decays as i32)).abs() < 1e-12);
            }
        }
    }
}
