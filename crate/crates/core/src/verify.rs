//! Executable checks of the mathematical claims behind the decaying-momentum
//! rule: the norm-growth identity on scale-invariant objectives, the convex
//! convergence bound for the theory schedule, the unrolled-recursion
//! equivalence of momentum SGD, finite-difference gradient validation, and
//! the exact reductions to simpler optimizers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizers::{demon_adam_step, demon_sgdm_step, sgdm_step, OptimizerState, StepHyper};
use crate::problems::{
    make_logistic, make_mlp, make_quadratic, make_rosenbrock, make_scale_invariant,
    make_synthetic_data, Activation, DataKind, Problem,
};
use crate::schedules::{cosine_value, demon_beta, demon_theory_beta, linear_value};

/// One per-iteration record of a training or verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: usize,
    pub loss: f64,
    pub val_metric: Option<f64>,
    pub beta_t: f64,
    pub eta_t: f64,
    pub theta_norm_sq: f64,
    pub v_norm_sq: f64,
    pub grad_norm: f64,
}

/// Record stream of a run: `total + 1` rows including the initial state,
/// plus optional full parameter/velocity history for identity checks.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
    pub thetas: Option<Vec<Vec<f64>>>,
    pub velocities: Option<Vec<Vec<f64>>>,
    pub diverged: bool,
    pub from_scale_invariant: bool,
}

impl Trace {
    /// Row-count and ordering invariants.
    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.t != i {
                return Err(Error::domain(format!("trace row {i} has t = {}", row.t)));
            }
        }
        if let Some(thetas) = &self.thetas {
            if thetas.len() != self.rows.len() {
                return Err(Error::domain("theta history length mismatch"));
            }
        }
        if let Some(vs) = &self.velocities {
            if vs.len() != self.rows.len() {
                return Err(Error::domain("velocity history length mismatch"));
            }
        }
        Ok(())
    }

    pub fn final_loss(&self) -> Option<f64> {
        self.rows.last().map(|r| r.loss)
    }
}

/// Outcome of one verification check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub passed: bool,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub witness: String,
}

impl CheckReport {
    fn new(name: &str, passed: bool, max_abs: f64, max_rel: f64, witness: String) -> Self {
        CheckReport {
            check_name: name.to_string(),
            passed,
            max_abs_error: max_abs,
            max_rel_error: max_rel,
            witness,
        }
    }
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Run the plain-momentum recursion `theta_{t+1} = theta_t + eta v_t`,
/// `v_t = beta_{t-1} v_{t-1} - g_t` with `v_0 = 0`, retaining the full
/// parameter and velocity history. `betas[j]` is the coefficient applied to
/// `v_j` when forming `v_{j+1}`; the run makes `betas.len()` updates.
pub fn run_norm_sgdm(problem: &Problem, theta0: &[f64], eta: f64, betas: &[f64]) -> Result<Trace> {
    let total = betas.len();
    let mut thetas = vec![theta0.to_vec()];
    let mut vs = vec![vec![0.0; theta0.len()]];
    let g0 = problem.grad(theta0)?;
    let mut rows = vec![TraceRow {
        t: 0,
        loss: problem.eval(theta0)?,
        val_metric: None,
        beta_t: betas.first().copied().unwrap_or(0.0),
        eta_t: eta,
        theta_norm_sq: norm_sq(theta0),
        v_norm_sq: 0.0,
        grad_norm: norm_sq(&g0).sqrt(),
    }];
    for t in 1..=total {
        let prev_theta = &thetas[t - 1];
        let prev_v = &vs[t - 1];
        let theta: Vec<f64> = prev_theta
            .iter()
            .zip(prev_v)
            .map(|(th, v)| th + eta * v)
            .collect();
        let g = problem.grad(&theta)?;
        let v: Vec<f64> = prev_v
            .iter()
            .zip(&g)
            .map(|(v, gi)| betas[t - 1] * v - gi)
            .collect();
        rows.push(TraceRow {
            t,
            loss: problem.eval(&theta)?,
            val_metric: None,
            beta_t: betas.get(t).copied().unwrap_or(0.0),
            eta_t: eta,
            theta_norm_sq: norm_sq(&theta),
            v_norm_sq: norm_sq(&v),
            grad_norm: norm_sq(&g).sqrt(),
        });
        thetas.push(theta);
        vs.push(v);
    }
    Ok(Trace {
        rows,
        thetas: Some(thetas),
        velocities: Some(vs),
        diverged: false,
        from_scale_invariant: problem.scale_invariant,
    })
}

/// Verify the norm-growth identity
///
/// ```text
/// ||theta_{t+1}||^2 = ||theta_t||^2 + eta^2 ||v_t||^2
///                   + 2 eta^2 sum_{i=0}^{t-1} beta_i ... beta_{t-1} ||v_i||^2
/// ```
///
/// on a trace produced by [`run_norm_sgdm`] over a scale-invariant problem.
/// Both the explicit-sum form and a running-sum form (maintaining
/// `a_t = <theta_t, v_t>` recursively) are evaluated; the check passes when
/// each stays within `1e-8` relative error at every step.
pub fn check_lemma1(trace: &Trace, eta: f64) -> Result<CheckReport> {
    if !trace.from_scale_invariant {
        return Err(Error::domain(
            "norm-growth check requires a trace from a scale-invariant problem",
        ));
    }
    let (thetas, vs) = match (&trace.thetas, &trace.velocities) {
        (Some(t), Some(v)) => (t, v),
        _ => {
            return Err(Error::domain(
                "norm-growth check requires full parameter and velocity history",
            ))
        }
    };
    trace.validate()?;
    // hidden test hook: perturb the explicit sum so the detector can be tested
    let fault = std::env::var("DEMON_OPT_FAULT_INJECT")
        .map(|v| v == "lemma1")
        .unwrap_or(false);

    let total = thetas.len() - 1;
    let v_norms: Vec<f64> = vs.iter().map(|v| norm_sq(v)).collect();
    let betas: Vec<f64> = trace.rows.iter().map(|r| r.beta_t).collect();

    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    let mut witness = String::from("all steps within tolerance");
    let mut running = 0.0f64; // a_t = <theta_t, v_t>, built recursively
    for t in 0..total {
        if t > 0 {
            running = betas[t - 1] * (running + eta * v_norms[t - 1]);
        }
        let lhs = norm_sq(&thetas[t + 1]);

        let mut tail = 0.0;
        let mut product = 1.0;
        for i in (0..t).rev() {
            product *= betas[i];
            tail += product * v_norms[i];
        }
        if fault {
            tail += 1e-3;
        }
        let rhs_explicit = norm_sq(&thetas[t]) + eta * eta * v_norms[t] + 2.0 * eta * eta * tail;
        let rhs_running = norm_sq(&thetas[t]) + eta * eta * v_norms[t] + 2.0 * eta * running;

        for (rhs, form) in [(rhs_explicit, "explicit"), (rhs_running, "running")] {
            let abs = (lhs - rhs).abs();
            let rel = abs / lhs.abs().max(1e-300);
            if rel > max_rel {
                max_rel = rel;
                max_abs = abs;
                witness = format!("t = {t}, {form} form: lhs = {lhs}, rhs = {rhs}");
            }
        }
    }
    Ok(CheckReport::new(
        "lemma1",
        max_rel <= 1e-8,
        max_abs,
        max_rel,
        witness,
    ))
}

/// Admissible step-size interval `(0, 2/(3L))` for the convergence bound.
pub fn theorem1_alpha_interval(l: f64) -> (f64, f64) {
    (0.0, 2.0 / (3.0 * l))
}

/// Verify the convergence bound
///
/// ```text
/// f(mean(theta_1..theta_T)) - f* <= (||theta_1 - theta*||^2 / T) (3L/4 + 1/(2 alpha))
/// ```
///
/// for the heavy-ball iteration
/// `theta_{t+1} = theta_t - alpha grad f(theta_t) + beta_t (theta_t - theta_{t-1})`
/// with `beta_t = (1/t)(t+1)/(t+2)` and `theta_0 = theta_1`, checked at every
/// prefix `1..=total`.
pub fn check_theorem1(
    problem: &Problem,
    alpha: f64,
    total: usize,
    theta1: &[f64],
) -> Result<CheckReport> {
    let l = problem
        .lipschitz_l
        .ok_or_else(|| Error::domain("bound check requires a known Lipschitz constant"))?;
    let f_star = problem
        .optimum_value
        .ok_or_else(|| Error::domain("bound check requires a known optimum"))?;
    let theta_star = problem
        .optimum_point
        .clone()
        .ok_or_else(|| Error::domain("bound check requires a known optimum point"))?;
    let (lo, hi) = theorem1_alpha_interval(l);
    if !(alpha > lo && alpha < hi) {
        return Err(Error::domain(format!(
            "alpha = {alpha} outside the admissible interval ({lo}, {hi})"
        )));
    }
    if total == 0 {
        return Err(Error::domain("total must be >= 1"));
    }

    let dist_sq = theta1
        .iter()
        .zip(&theta_star)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>();
    let constant = dist_sq * (0.75 * l + 1.0 / (2.0 * alpha));

    let mut theta_prev = theta1.to_vec();
    let mut theta = theta1.to_vec();
    let mut sum = vec![0.0; theta1.len()];
    let mut max_ratio = 0.0f64;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut witness = String::from("bound held at every prefix");
    let mut passed = true;
    for t in 1..=total {
        for (s, th) in sum.iter_mut().zip(&theta) {
            *s += th;
        }
        let cesaro: Vec<f64> = sum.iter().map(|s| s / t as f64).collect();
        let subopt = problem.eval(&cesaro)? - f_star;
        let bound = constant / t as f64;
        let gap = subopt - bound;
        if bound > 0.0 {
            max_ratio = max_ratio.max(subopt / bound);
        }
        if gap > worst_gap {
            worst_gap = gap;
            witness = format!("prefix T = {t}: suboptimality = {subopt}, bound = {bound}");
        }
        if gap > 0.0 {
            passed = false;
        }

        let beta_t = demon_theory_beta(t as f64)?;
        let g = problem.grad(&theta)?;
        let next: Vec<f64> = (0..theta.len())
            .map(|i| theta[i] - alpha * g[i] + beta_t * (theta[i] - theta_prev[i]))
            .collect();
        theta_prev = std::mem::replace(&mut theta, next);
    }
    Ok(CheckReport::new(
        "theorem1",
        passed,
        worst_gap.max(0.0),
        max_ratio,
        witness,
    ))
}

/// Verify that the recursive momentum trajectory equals the explicit
/// unrolled sum
///
/// ```text
/// theta_{t+1} = theta_0 - eta sum_{s<=t} sum_{j<=s} (beta_{j+1} ... beta_s) g_j
/// ```
///
/// for gradients supplied as data (open loop, `v_0 = 0`), to `1e-10`
/// relative at every step.
pub fn check_unroll_equivalence(
    gradients: &[Vec<f64>],
    eta: f64,
    betas: &[f64],
) -> Result<CheckReport> {
    if gradients.len() != betas.len() {
        return Err(Error::DimensionMismatch {
            expected: gradients.len(),
            got: betas.len(),
        });
    }
    if gradients.is_empty() {
        return Ok(CheckReport::new(
            "unroll",
            true,
            0.0,
            0.0,
            "empty sequence".into(),
        ));
    }
    let dim = gradients[0].len();
    let total = gradients.len();

    let mut state = OptimizerState::new(vec![0.0; dim]);
    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    let mut witness = String::from("all steps within tolerance");
    for t in 0..total {
        let h = StepHyper {
            eta,
            beta: betas[t],
            ..StepHyper::default()
        };
        sgdm_step(&mut state, &gradients[t], &h)?;

        // explicit form, recomputed from scratch: the coefficient of g_j in
        // v_{s+1} is the product beta_{j+1} ... beta_s
        let mut explicit = vec![0.0; dim];
        for s in 0..=t {
            let mut coeff = vec![0.0; s + 1];
            coeff[s] = 1.0;
            for j in (0..s).rev() {
                coeff[j] = coeff[j + 1] * betas[j + 1];
            }
            for (j, c) in coeff.iter().enumerate() {
                for (e, g) in explicit.iter_mut().zip(&gradients[j]) {
                    *e -= eta * c * g;
                }
            }
        }
        let diff = state
            .theta
            .iter()
            .zip(&explicit)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let scale = norm_sq(&state.theta)
            .sqrt()
            .max(norm_sq(&explicit).sqrt())
            .max(1e-30);
        let rel = diff / scale;
        if rel > max_rel {
            max_rel = rel;
            max_abs = diff;
            witness = format!("t = {t}: ||recursive - explicit|| = {diff}");
        }
    }
    Ok(CheckReport::new(
        "unroll",
        max_rel <= 1e-10,
        max_abs,
        max_rel,
        witness,
    ))
}

/// Central-difference gradient validation at the given points.
///
/// The per-coordinate step is `h_rel * max(1, |theta_i|)`. Points too close
/// to an activation kink (per [`Problem::kink_margin`]) or at a singularity
/// are skipped with a note in the witness. The error metric is
/// `||g_analytic - g_fd|| / max(||g_analytic||, ||g_fd||)`.
pub fn check_gradient(
    problem: &Problem,
    points: &[Vec<f64>],
    h_rel: f64,
    tol: f64,
) -> Result<CheckReport> {
    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    let mut witness = String::from("all points within tolerance");
    let mut skipped = 0usize;
    for (pi, point) in points.iter().enumerate() {
        if let Some(margin) = problem.kink_margin(point) {
            if margin < 1e-4 {
                skipped += 1;
                continue;
            }
        }
        let analytic = match problem.grad(point) {
            Ok(g) => g,
            Err(Error::Domain(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut fd = vec![0.0; point.len()];
        let mut probe = point.clone();
        for i in 0..point.len() {
            let h = h_rel * point[i].abs().max(1.0);
            let base = point[i];
            probe[i] = base + h;
            let h_plus = probe[i] - base; // the exactly representable step
            let f_plus = problem.eval(&probe)?;
            probe[i] = base - h;
            let h_minus = base - probe[i];
            let f_minus = problem.eval(&probe)?;
            probe[i] = base;
            fd[i] = (f_plus - f_minus) / (h_plus + h_minus);
        }
        let diff = analytic
            .iter()
            .zip(&fd)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let scale = norm_sq(&analytic)
            .sqrt()
            .max(norm_sq(&fd).sqrt())
            .max(1e-12);
        let rel = diff / scale;
        if rel > max_rel {
            max_rel = rel;
            max_abs = diff;
            witness = format!("point {pi}: ||analytic - fd|| = {diff}, scale = {scale}");
        }
    }
    if skipped > 0 {
        witness = format!("{witness} ({skipped} points skipped near kinks/singularities)");
    }
    Ok(CheckReport::new(
        &format!("gradient/{}", problem.name()),
        max_rel <= tol,
        max_abs,
        max_rel,
        witness,
    ))
}

/// Exercise the exact reductions on a fixed quadratic: decaying momentum with
/// `beta_init = 0` against SGD, a constant momentum schedule against plain
/// SGDM, and decaying-momentum Adam with `beta_init = 0` against an
/// independently coded second-moment-only update. Each pair must agree
/// stepwise to `1e-14`.
pub fn check_reductions() -> Result<Vec<CheckReport>> {
    let problem = make_quadratic(1.0, 0.25, 4)?;
    let theta0 = problem.init_point().to_vec();
    let total = 100usize;
    let eta = 0.1;
    let extras = StepHyper::default();

    let mut reports = Vec::new();

    // decaying momentum with beta_init = 0 vs SGD
    {
        let mut a = OptimizerState::new(theta0.clone());
        let mut b = OptimizerState::new(theta0.clone());
        let mut max_abs = 0.0f64;
        for t in 0..total {
            let ga = problem.grad(&a.theta)?;
            demon_sgdm_step(&mut a, &ga, eta, 0.0, t, total, &extras)?;
            let gb = problem.grad(&b.theta)?;
            sgdm_step(&mut b, &gb, &StepHyper::new(eta, 0.0))?;
            max_abs = max_abs.max(max_coord_diff(&a.theta, &b.theta));
        }
        reports.push(CheckReport::new(
            "reduction/demon-sgdm-beta0-vs-sgd",
            max_abs <= 1e-14,
            max_abs,
            max_abs,
            format!("{total} steps on a fixed quadratic"),
        ));
    }

    // constant momentum schedule vs plain SGDM
    {
        let beta = 0.9;
        let spec =
            crate::schedules::ScheduleSpec::constant(beta, crate::schedules::ScheduleTarget::Momentum);
        let mut a = OptimizerState::new(theta0.clone());
        let mut b = OptimizerState::new(theta0.clone());
        let mut max_abs = 0.0f64;
        for t in 0..total {
            let beta_t = crate::schedules::schedule_eval(&spec, t as f64, total as f64, None)?;
            let ga = problem.grad(&a.theta)?;
            sgdm_step(&mut a, &ga, &StepHyper::new(eta, beta_t))?;
            let gb = problem.grad(&b.theta)?;
            sgdm_step(&mut b, &gb, &StepHyper::new(eta, beta))?;
            max_abs = max_abs.max(max_coord_diff(&a.theta, &b.theta));
        }
        reports.push(CheckReport::new(
            "reduction/constant-schedule-vs-sgdm",
            max_abs <= 1e-14,
            max_abs,
            max_abs,
            format!("{total} steps on a fixed quadratic"),
        ));
    }

    // decaying-momentum Adam with beta_init = 0 vs second-moment-only update
    {
        let (beta2, eps, eta) = (0.999, 1e-8, 0.01);
        let h = StepHyper {
            eta,
            beta: 0.0,
            beta2,
            epsilon: eps,
            weight_decay: 0.0,
        };
        let mut a = OptimizerState::new(theta0.clone());
        let mut theta = theta0.clone();
        let mut second = vec![0.0; theta.len()];
        let mut max_abs = 0.0f64;
        for t in 0..total {
            let ga = problem.grad(&a.theta)?;
            demon_adam_step(&mut a, &ga, eta, 0.0, t, total, &h)?;

            // independent second-moment-only update, epsilon inside the root
            let g = problem.grad(&theta)?;
            for i in 0..theta.len() {
                second[i] = beta2 * second[i] + (1.0 - beta2) * g[i] * g[i];
                theta[i] -= eta / (second[i] + eps).sqrt() * g[i];
            }
            max_abs = max_abs.max(max_coord_diff(&a.theta, &theta));
        }
        reports.push(CheckReport::new(
            "reduction/demon-adam-beta0-vs-second-moment-only",
            max_abs <= 1e-14,
            max_abs,
            max_abs,
            format!("{total} steps on a fixed quadratic"),
        ));
    }

    Ok(reports)
}

fn max_coord_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn seeded_points(dim: usize, count: usize, seed: u64, scale: f64) -> Vec<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| rng.gen_range(-scale..scale)).collect())
        .collect()
}

/// Decaying-momentum values `beta_0 .. beta_total` over a horizon.
fn demon_schedule(total: usize, beta_init: f64) -> Result<Vec<f64>> {
    (0..=total)
        .map(|t| demon_beta(t as f64, total as f64, beta_init))
        .collect()
}

/// Norm-growth identity suite: constant and decaying momentum on the
/// scale-invariant problem, dim 8, 200 full-batch iterations.
pub fn suite_lemma1() -> Result<Vec<CheckReport>> {
    let problem = make_scale_invariant(8)?;
    let total = 200;
    let eta = 0.05;
    let theta0: Vec<f64> = {
        let pts = seeded_points(8, 1, 2024, 1.0);
        let norm = norm_sq(&pts[0]).sqrt();
        pts[0].iter().map(|x| x / norm).collect()
    };
    let mut reports = Vec::new();
    for (label, betas) in [
        ("constant-0.9", vec![0.9; total + 1]),
        ("demon-0.9", demon_schedule(total, 0.9)?),
    ] {
        let mut trace = run_norm_sgdm(&problem, &theta0, eta, &betas[..total])?;
        for (row, b) in trace.rows.iter_mut().zip(&betas) {
            row.beta_t = *b;
        }
        let mut report = check_lemma1(&trace, eta)?;
        report.check_name = format!("lemma1/{label}");
        reports.push(report);
    }
    Ok(reports)
}

/// Convergence-bound suite over 1-D and 8-D quadratics, a grid of Lipschitz
/// constants and step sizes, and three seeded starting points each.
pub fn suite_theorem1() -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    for dim in [1usize, 8] {
        let mut passed = true;
        let mut max_rel = 0.0f64;
        let mut max_abs = 0.0f64;
        let mut witness = String::from("bound held over the whole grid");
        for l in [0.5, 1.0, 4.0] {
            let problem = if dim == 1 {
                make_quadratic(l, l, 1)?
            } else {
                make_quadratic(l, l / 10.0, dim)?
            };
            for alpha_frac in [0.1, 0.3, 0.6] {
                let alpha = alpha_frac / l;
                for (si, theta1) in seeded_points(dim, 3, 7 + dim as u64, 3.0).iter().enumerate() {
                    let report = check_theorem1(&problem, alpha, 1000, theta1)?;
                    if report.max_rel_error > max_rel {
                        max_rel = report.max_rel_error;
                        max_abs = report.max_abs_error;
                        witness = format!(
                            "dim = {dim}, L = {l}, alpha = {alpha}, start {si}: {}",
                            report.witness
                        );
                    }
                    passed &= report.passed;
                }
            }
        }
        reports.push(CheckReport::new(
            &format!("theorem1/dim{dim}"),
            passed,
            max_abs,
            max_rel,
            witness,
        ));
    }
    Ok(reports)
}

/// Unroll-equivalence suite: constant, decaying, cosine, and linear momentum
/// schedules against a fixed random gradient sequence.
pub fn suite_unroll() -> Result<Vec<CheckReport>> {
    let total = 100;
    let dim = 5;
    let gradients = seeded_points(dim, total, 99, 1.0);
    let eta = 0.05;
    let mut reports = Vec::new();
    let schedules: Vec<(&str, Vec<f64>)> = vec![
        ("constant-0.9", vec![0.9; total]),
        ("demon-0.9", demon_schedule(total - 1, 0.9)?),
        (
            "cosine-0.9",
            (0..total)
                .map(|t| cosine_value(t as f64, total as f64, 0.9, 0.0))
                .collect::<Result<_>>()?,
        ),
        (
            "linear-0.9",
            (0..total)
                .map(|t| linear_value(t as f64, total as f64, 0.9))
                .collect::<Result<_>>()?,
        ),
    ];
    for (label, betas) in schedules {
        let mut report = check_unroll_equivalence(&gradients, eta, &betas)?;
        report.check_name = format!("unroll/{label}");
        reports.push(report);
    }
    Ok(reports)
}

/// Finite-difference suite across every problem family, 10 seeded points
/// each; quadratics at `1e-6`, everything else at the module default `1e-4`.
pub fn suite_gradients() -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();

    let quad = make_quadratic(1.0, 0.1, 6)?;
    reports.push(check_gradient(&quad, &seeded_points(6, 10, 11, 3.0), 1e-5, 1e-6)?);

    let rosen = make_rosenbrock(4)?;
    reports.push(check_gradient(&rosen, &seeded_points(4, 10, 12, 2.0), 1e-5, 1e-4)?);

    let data = make_synthetic_data(DataKind::TwoGaussians, 40, 3, 0.3, 13)?;
    let logistic = make_logistic(&data, 0.01)?;
    reports.push(check_gradient(
        &logistic,
        &seeded_points(logistic.dim(), 10, 14, 1.0),
        1e-5,
        1e-4,
    )?);

    let moons = make_synthetic_data(DataKind::TwoMoons, 30, 2, 0.1, 15)?;
    let mlp = make_mlp(&[2, 6, 2], Activation::Tanh, &moons, 16)?;
    reports.push(check_gradient(
        &mlp,
        &seeded_points(mlp.dim(), 10, 17, 1.0),
        1e-5,
        1e-4,
    )?);

    let si = make_scale_invariant(5)?;
    let mut points = seeded_points(5, 10, 18, 1.0);
    for p in &mut points {
        let n = norm_sq(p).sqrt();
        for x in p.iter_mut() {
            *x /= n;
        }
    }
    reports.push(check_gradient(&si, &points, 1e-6, 1e-6)?);

    Ok(reports)
}

/// Reduction suite (three paired-trajectory checks).
pub fn suite_reductions() -> Result<Vec<CheckReport>> {
    check_reductions()
}

/// Every suite, concatenated.
pub fn suite_all() -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    reports.extend(suite_lemma1()?);
    reports.extend(suite_theorem1()?);
    reports.extend(suite_unroll()?);
    reports.extend(suite_gradients()?);
    reports.extend(suite_reductions()?);
    Ok(reports)
}
