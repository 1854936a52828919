//! Experiment orchestration: single training runs, learning-rate x momentum
//! grid sweeps, and the effective-learning-rate comparison, with fully
//! deterministic CSV/JSONL outputs.
//!
//! Determinism contract: `(config, seeds)` fixes every output byte. Grid
//! cells are embarrassingly parallel; parallel and serial execution produce
//! identical results because outcomes merge by cell index.

use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizers::{
    adam_step, demon_adam_step, demon_sgdm_step, sgdm_step, OptimizerState, StepHyper,
};
use crate::problems::{
    epoch_batches, make_logistic, make_mlp, make_quadratic, make_rosenbrock,
    make_scale_invariant, make_synthetic_data, train_val_split, Activation, DataKind, Problem,
};
use crate::schedules::{schedule_eval, PlateauState, ScheduleKind, ScheduleSpec, ScheduleTarget};
use crate::verify::{Trace, TraceRow};

/// Optimizer selector for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Sgd,
    Sgdm,
    Adam,
    DemonSgdm,
    DemonAdam,
}

/// Synthetic dataset description inside a problem spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub kind: DataKind,
    pub n: usize,
    pub d: usize,
    pub noise: f64,
    pub seed: u64,
}

impl DataSpec {
    pub fn build(&self) -> Result<crate::problems::Dataset> {
        make_synthetic_data(self.kind, self.n, self.d, self.noise, self.seed)
    }
}

/// Problem generator plus parameters plus seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Quadratic {
        l: f64,
        mu: f64,
        dim: usize,
    },
    Rosenbrock {
        dim: usize,
    },
    Logistic {
        data: DataSpec,
        #[serde(default)]
        l2: f64,
    },
    Mlp {
        layers: Vec<usize>,
        activation: Activation,
        data: DataSpec,
        seed: u64,
    },
    ScaleInvariant {
        dim: usize,
    },
}

impl ProblemSpec {
    pub fn build(&self) -> Result<Problem> {
        match self {
            ProblemSpec::Quadratic { l, mu, dim } => make_quadratic(*l, *mu, *dim),
            ProblemSpec::Rosenbrock { dim } => make_rosenbrock(*dim),
            ProblemSpec::Logistic { data, l2 } => make_logistic(&data.build()?, *l2),
            ProblemSpec::Mlp {
                layers,
                activation,
                data,
                seed,
            } => make_mlp(layers, *activation, &data.build()?, *seed),
            ProblemSpec::ScaleInvariant { dim } => make_scale_invariant(*dim),
        }
    }

    /// Sample count for data-backed specs.
    pub fn n_samples(&self) -> Option<usize> {
        match self {
            ProblemSpec::Logistic { data, .. } | ProblemSpec::Mlp { data, .. } => Some(data.n),
            _ => None,
        }
    }
}

fn default_beta2() -> f64 {
    0.999
}

fn default_epsilon() -> f64 {
    1e-8
}

/// Full experiment description. The config file is a JSON record mirroring
/// these field names; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem_spec: ProblemSpec,
    pub optimizer: OptimizerKind,
    pub lr_schedule: ScheduleSpec,
    pub momentum_schedule: ScheduleSpec,
    #[serde(rename = "T")]
    pub total_iters: usize,
    pub epochs: usize,
    #[serde(default)]
    pub batch_size: Option<usize>,
    #[serde(default)]
    pub weight_decay: f64,
    pub seed: u64,
    #[serde(default)]
    pub record_full_vectors: bool,
    #[serde(default)]
    pub grad_clip: Option<f64>,
    #[serde(default = "default_beta2")]
    pub adam_beta2: f64,
    #[serde(default = "default_epsilon")]
    pub adam_epsilon: f64,
}

impl RunConfig {
    /// Iterations per epoch: `ceil(train_samples / batch_size)` when
    /// mini-batching, 1 otherwise (every full-batch iteration is an epoch).
    pub fn iters_per_epoch(&self) -> Result<usize> {
        match self.batch_size {
            None => Ok(1),
            Some(b) => {
                if b == 0 {
                    return Err(Error::config("batch_size must be positive"));
                }
                let n = self
                    .problem_spec
                    .n_samples()
                    .ok_or_else(|| Error::config("batch_size set on a problem without samples"))?;
                let n_train = n - n / 5;
                Ok(n_train.div_ceil(b))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_iters == 0 {
            return Err(Error::config("T must be >= 1"));
        }
        if self.epochs == 0 {
            return Err(Error::config("epochs must be >= 1"));
        }
        self.lr_schedule
            .validate()
            .map_err(|e| Error::config(format!("lr_schedule: {e}")))?;
        if self.lr_schedule.target != ScheduleTarget::LearningRate {
            return Err(Error::config("lr_schedule.target must be learning_rate"));
        }
        self.momentum_schedule
            .validate()
            .map_err(|e| Error::config(format!("momentum_schedule: {e}")))?;
        if self.momentum_schedule.target != ScheduleTarget::Momentum {
            return Err(Error::config("momentum_schedule.target must be momentum"));
        }
        // exactly one momentum source: the decaying-momentum optimizers own
        // their rule (its beta_init carried by the demon spec); every other
        // optimizer takes an explicit non-demon schedule
        match self.optimizer {
            OptimizerKind::Sgd => {
                if self.momentum_schedule.kind != ScheduleKind::Constant
                    || self.momentum_schedule.init_value != 0.0
                {
                    return Err(Error::config(
                        "sgd requires a constant momentum schedule with init_value 0",
                    ));
                }
            }
            OptimizerKind::Sgdm | OptimizerKind::Adam => {
                if self.momentum_schedule.kind == ScheduleKind::Demon {
                    return Err(Error::config(
                        "demon momentum belongs to the demon_sgdm/demon_adam optimizers",
                    ));
                }
            }
            OptimizerKind::DemonSgdm | OptimizerKind::DemonAdam => {
                if self.momentum_schedule.kind != ScheduleKind::Demon {
                    return Err(Error::config(
                        "demon optimizers require a demon momentum schedule carrying beta_init",
                    ));
                }
            }
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return Err(Error::config("weight_decay must be finite and >= 0"));
        }
        if let Some(c) = self.grad_clip {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::config("grad_clip must be finite and > 0"));
            }
        }
        if !(0.0..1.0).contains(&self.adam_beta2) {
            return Err(Error::config("adam_beta2 outside [0, 1)"));
        }
        if !(self.adam_epsilon.is_finite() && self.adam_epsilon > 0.0) {
            return Err(Error::config("adam_epsilon must be finite and > 0"));
        }
        let ipe = self.iters_per_epoch()?;
        if self.total_iters != self.epochs * ipe {
            return Err(Error::config(format!(
                "T = {} must equal epochs x iters_per_epoch = {} x {}",
                self.total_iters, self.epochs, ipe
            )));
        }
        Ok(())
    }
}

/// Divergence threshold on the parameter norm.
const DIVERGENCE_NORM: f64 = 1e12;

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn plateau_for(spec: &ScheduleSpec) -> Option<PlateauState> {
    (spec.kind == ScheduleKind::Plateau).then(|| PlateauState::new(spec.init_value))
}

/// Evaluate a momentum schedule at iteration `t`; the theory schedule is
/// 1-indexed, so it is sampled at `t + 1`.
fn momentum_at(
    spec: &ScheduleSpec,
    t: usize,
    total: usize,
    plateau: Option<&PlateauState>,
) -> Result<f64> {
    let t_eff = if spec.kind == ScheduleKind::DemonTheory {
        (t + 1) as f64
    } else {
        t as f64
    };
    schedule_eval(spec, t_eff, total as f64, plateau)
}

/// Execute one training run and return its complete trace.
///
/// The trace has `T + 1` rows: row `t` describes the state after `t`
/// updates, with the schedule values evaluated at index `t` (the values
/// update `t` consumes). Divergence (non-finite loss or `||theta|| > 1e12`)
/// stops the run early with the diverged flag set rather than erroring.
pub fn run_training(config: &RunConfig) -> Result<Trace> {
    config.validate()?;
    let problem = config.problem_spec.build()?;
    let total = config.total_iters;
    let ipe = config.iters_per_epoch()?;
    let data_backed = problem.n_samples().is_some();
    let (train_idx, val_idx) = match problem.n_samples() {
        Some(n) => train_val_split(n, config.seed),
        None => (Vec::new(), Vec::new()),
    };

    let train_loss = |theta: &[f64]| -> Result<f64> {
        if data_backed {
            problem.eval_batch(theta, &train_idx)
        } else {
            problem.eval(theta)
        }
    };
    let val_metric = |theta: &[f64]| -> Result<f64> {
        if data_backed && !val_idx.is_empty() {
            problem.eval_batch(theta, &val_idx)
        } else {
            train_loss(theta)
        }
    };

    let mut state = OptimizerState::new(problem.init_point().to_vec());
    let mut plateau_lr = plateau_for(&config.lr_schedule);
    let mut plateau_m = plateau_for(&config.momentum_schedule);
    let beta_init = config.momentum_schedule.init_value;

    let mut rows: Vec<TraceRow> = Vec::with_capacity(total + 1);
    let mut thetas = config.record_full_vectors.then(Vec::new);
    let mut velocities = config.record_full_vectors.then(Vec::new);
    let mut batches: Vec<Vec<usize>> = Vec::new();
    let mut diverged = false;

    for t in 0..=total {
        let epoch_boundary = t % ipe == 0;
        let mut val = None;
        if epoch_boundary || t == total {
            let vm = val_metric(&state.theta)?;
            val = Some(vm);
            if t > 0 && vm.is_finite() {
                if let Some(ps) = &mut plateau_lr {
                    *ps = crate::schedules::plateau_update(
                        ps,
                        vm,
                        config.lr_schedule.patience,
                        config.lr_schedule.factor,
                    )?;
                }
                if let Some(ps) = &mut plateau_m {
                    *ps = crate::schedules::plateau_update(
                        ps,
                        vm,
                        config.momentum_schedule.patience,
                        config.momentum_schedule.factor,
                    )?;
                }
            }
        }
        if let Some(b) = config.batch_size {
            if epoch_boundary && t < total {
                batches = epoch_batches(&train_idx, b, config.seed, t / ipe);
            }
        }

        let eta_t = schedule_eval(
            &config.lr_schedule,
            t as f64,
            total as f64,
            plateau_lr.as_ref(),
        )?;
        let beta_t = momentum_at(&config.momentum_schedule, t, total, plateau_m.as_ref())?;

        let loss = train_loss(&state.theta)?;
        let g = if t < total && config.batch_size.is_some() {
            problem.grad_batch(&state.theta, &batches[t % ipe])?
        } else if data_backed {
            problem.grad_batch(&state.theta, &train_idx)?
        } else {
            problem.grad(&state.theta)?
        };
        let grad_norm = norm_sq(&g).sqrt();

        rows.push(TraceRow {
            t,
            loss,
            val_metric: val,
            beta_t,
            eta_t,
            theta_norm_sq: norm_sq(&state.theta),
            v_norm_sq: norm_sq(&state.v),
            grad_norm,
        });
        if let Some(h) = &mut thetas {
            h.push(state.theta.clone());
        }
        if let Some(h) = &mut velocities {
            h.push(state.v.clone());
        }

        if !loss.is_finite() || norm_sq(&state.theta) > DIVERGENCE_NORM * DIVERGENCE_NORM {
            diverged = true;
            break;
        }
        if t == total {
            break;
        }

        let g = match config.grad_clip {
            Some(max_norm) if grad_norm > max_norm => {
                g.iter().map(|x| x * (max_norm / grad_norm)).collect()
            }
            _ => g,
        };
        let hyper = StepHyper {
            eta: eta_t,
            beta: beta_t,
            beta2: config.adam_beta2,
            epsilon: config.adam_epsilon,
            weight_decay: config.weight_decay,
        };
        let step_result = match config.optimizer {
            OptimizerKind::Sgd | OptimizerKind::Sgdm => sgdm_step(&mut state, &g, &hyper),
            OptimizerKind::Adam => adam_step(&mut state, &g, &hyper),
            OptimizerKind::DemonSgdm => {
                demon_sgdm_step(&mut state, &g, eta_t, beta_init, t, total, &hyper)
            }
            OptimizerKind::DemonAdam => {
                demon_adam_step(&mut state, &g, eta_t, beta_init, t, total, &hyper)
            }
        };
        match step_result {
            Ok(()) => {}
            Err(Error::NonFiniteGradient { .. }) => {
                diverged = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }

    Ok(Trace {
        rows,
        thetas,
        velocities,
        diverged,
        from_scale_invariant: problem.scale_invariant,
    })
}

/// One aggregated grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub lr: f64,
    pub momentum: f64,
    pub mean_final_val: Option<f64>,
    pub std_final_val: Option<f64>,
    pub mean_best_val: Option<f64>,
    pub mean_final_train_loss: Option<f64>,
    pub diverged_count: usize,
    pub n_seeds: usize,
    pub seeds: Vec<u64>,
}

/// Result of a learning-rate x momentum sweep. Cells are ordered lr-major,
/// momentum-minor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub lr_values: Vec<f64>,
    pub momentum_values: Vec<f64>,
    pub seeds: Vec<u64>,
    pub cells: Vec<GridCell>,
}

fn cell_config(base: &RunConfig, lr: f64, momentum: f64, seed: u64) -> Result<RunConfig> {
    let mut cfg = base.clone();
    // floors rescale proportionally so shaped schedules keep their ratio
    if cfg.lr_schedule.init_value > 0.0 && cfg.lr_schedule.min_value > 0.0 {
        cfg.lr_schedule.min_value *= lr / cfg.lr_schedule.init_value;
    }
    cfg.lr_schedule.init_value = lr;
    if cfg.momentum_schedule.init_value > 0.0 && cfg.momentum_schedule.min_value > 0.0 {
        cfg.momentum_schedule.min_value *= momentum / cfg.momentum_schedule.init_value;
    }
    cfg.momentum_schedule.init_value = momentum;
    cfg.seed = seed;
    cfg.validate()?;
    Ok(cfg)
}

struct SeedOutcome {
    final_val: f64,
    best_val: f64,
    final_train: f64,
    diverged: bool,
}

fn run_cell_seed(base: &RunConfig, lr: f64, momentum: f64, seed: u64) -> Result<SeedOutcome> {
    let cfg = cell_config(base, lr, momentum, seed)?;
    let trace = run_training(&cfg)?;
    let final_val = trace
        .rows
        .last()
        .and_then(|r| r.val_metric)
        .unwrap_or(f64::INFINITY);
    let best_val = trace
        .rows
        .iter()
        .filter_map(|r| r.val_metric)
        .fold(f64::INFINITY, f64::min);
    let final_train = trace.final_loss().unwrap_or(f64::INFINITY);
    let diverged = trace.diverged || !final_val.is_finite();
    Ok(SeedOutcome {
        final_val,
        best_val,
        final_train,
        diverged,
    })
}

/// Sweep every `(lr, momentum)` cell across the given seeds. Cells that
/// diverge are marked rather than failing the sweep; mean and population
/// standard deviation aggregate the finite seeds.
pub fn grid_search(
    base: &RunConfig,
    lr_values: &[f64],
    momentum_values: &[f64],
    seeds: &[u64],
    workers: usize,
) -> Result<GridResult> {
    if lr_values.is_empty() || momentum_values.is_empty() || seeds.is_empty() {
        return Err(Error::config("grid axes and seeds must be non-empty"));
    }
    let jobs: Vec<(f64, f64, u64)> = lr_values
        .iter()
        .flat_map(|&lr| {
            momentum_values
                .iter()
                .flat_map(move |&m| seeds.iter().map(move |&s| (lr, m, s)))
        })
        .collect();

    let outcomes: Vec<Result<SeedOutcome>> = if workers <= 1 {
        jobs.iter()
            .map(|&(lr, m, s)| run_cell_seed(base, lr, m, s))
            .collect()
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::config(format!("worker pool: {e}")))?;
        pool.install(|| {
            jobs.par_iter()
                .map(|&(lr, m, s)| run_cell_seed(base, lr, m, s))
                .collect()
        })
    };

    let mut cells = Vec::with_capacity(lr_values.len() * momentum_values.len());
    let mut it = outcomes.into_iter();
    for &lr in lr_values {
        for &m in momentum_values {
            let mut finals = Vec::new();
            let mut bests = Vec::new();
            let mut trains = Vec::new();
            let mut diverged_count = 0;
            for _ in seeds {
                let outcome = it.next().expect("job list covers every cell")?;
                if outcome.diverged {
                    diverged_count += 1;
                } else {
                    finals.push(outcome.final_val);
                    bests.push(outcome.best_val);
                    trains.push(outcome.final_train);
                }
            }
            let mean = |v: &[f64]| -> Option<f64> {
                (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
            };
            let mean_final = mean(&finals);
            let std_final = mean_final.map(|mu| {
                (finals.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / finals.len() as f64)
                    .sqrt()
            });
            cells.push(GridCell {
                lr,
                momentum: m,
                mean_final_val: mean_final,
                std_final_val: std_final,
                mean_best_val: mean(&bests),
                mean_final_train_loss: mean(&trains),
                diverged_count,
                n_seeds: seeds.len(),
                seeds: seeds.to_vec(),
            });
        }
    }
    Ok(GridResult {
        lr_values: lr_values.to_vec(),
        momentum_values: momentum_values.to_vec(),
        seeds: seeds.to_vec(),
        cells,
    })
}

/// Cell with the lowest mean final validation metric; ties break toward the
/// smaller learning rate, then the smaller momentum.
pub fn best_cell(result: &GridResult) -> Result<(f64, f64)> {
    let mut best: Option<(&GridCell, f64)> = None;
    for cell in &result.cells {
        let Some(mean) = cell.mean_final_val else {
            continue;
        };
        if !mean.is_finite() {
            continue;
        }
        let better = match best {
            None => true,
            Some((b, bm)) => {
                mean < bm
                    || (mean == bm
                        && (cell.lr < b.lr || (cell.lr == b.lr && cell.momentum < b.momentum)))
            }
        };
        if better {
            best = Some((cell, mean));
        }
    }
    best.map(|(c, _)| (c.lr, c.momentum))
        .ok_or_else(|| Error::domain("every grid cell diverged"))
}

/// Number of cells whose mean final metric is within `ratio` of the best
/// cell's (`ratio = 1.1` counts cells within 110% of the best loss).
pub fn robustness_count(result: &GridResult, ratio: f64) -> Result<usize> {
    let (lr, m) = best_cell(result)?;
    let best = result
        .cells
        .iter()
        .find(|c| c.lr == lr && c.momentum == m)
        .and_then(|c| c.mean_final_val)
        .expect("best cell has a finite mean");
    Ok(result
        .cells
        .iter()
        .filter(|c| matches!(c.mean_final_val, Some(v) if v.is_finite() && v <= ratio * best))
        .count())
}

/// The two arms of an effective-learning-rate comparison.
#[derive(Debug, Clone)]
pub struct ElrComparison {
    pub momentum_config: RunConfig,
    pub sgd_config: RunConfig,
    pub momentum_trace: Trace,
    pub sgd_trace: Trace,
}

/// Run the configured momentum arm against plain SGD with the step size
/// scaled by `1/(1 - m)`, identical seeds and data order.
pub fn elr_comparison(config: &RunConfig, m: f64) -> Result<ElrComparison> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::domain(format!("momentum m = {m} outside [0, 1)")));
    }
    match config.optimizer {
        OptimizerKind::Sgdm => {
            if config.momentum_schedule.kind != ScheduleKind::Constant
                || config.momentum_schedule.init_value != m
            {
                return Err(Error::config(
                    "the sgdm arm must use a constant momentum schedule equal to m",
                ));
            }
        }
        OptimizerKind::DemonSgdm => {
            if config.momentum_schedule.init_value != m {
                return Err(Error::config("m must equal the demon beta_init"));
            }
        }
        _ => {
            return Err(Error::config(
                "effective-learning-rate comparison expects an sgdm or demon_sgdm arm",
            ))
        }
    }
    let mut sgd_config = config.clone();
    sgd_config.optimizer = OptimizerKind::Sgd;
    sgd_config.momentum_schedule = ScheduleSpec::constant(0.0, ScheduleTarget::Momentum);
    let factor = 1.0 / (1.0 - m);
    sgd_config.lr_schedule.init_value *= factor;
    sgd_config.lr_schedule.min_value *= factor;
    sgd_config.validate()?;

    let momentum_trace = run_training(config)?;
    let sgd_trace = run_training(&sgd_config)?;
    Ok(ElrComparison {
        momentum_config: config.clone(),
        sgd_config,
        momentum_trace,
        sgd_trace,
    })
}

/// Output format for result files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Jsonl,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| Error::io(path, e))
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => String::from("NaN"),
    }
}

/// Trace CSV columns: `t,loss,val_metric,beta_t,eta_t,theta_norm_sq,v_norm_sq,grad_norm`
/// with `val_metric` blank off-epoch. Rewriting is idempotent.
pub fn emit_trace(trace: &Trace, path: &Path, format: EmitFormat) -> Result<()> {
    let contents = match format {
        EmitFormat::Csv => {
            let mut out =
                String::from("t,loss,val_metric,beta_t,eta_t,theta_norm_sq,v_norm_sq,grad_norm\n");
            for r in &trace.rows {
                let val = r.val_metric.map(|v| format!("{v}")).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.t, r.loss, val, r.beta_t, r.eta_t, r.theta_norm_sq, r.v_norm_sq, r.grad_norm
                ));
            }
            out
        }
        EmitFormat::Jsonl => {
            let mut out = String::new();
            for r in &trace.rows {
                out.push_str(&serde_json::to_string(r).map_err(|e| Error::parse(e.to_string()))?);
                out.push('\n');
            }
            out
        }
    };
    write_file(path, &contents)
}

/// Grid CSV columns: `lr,momentum,mean_final_val,std_final_val,diverged_count,n_seeds`;
/// fully diverged cells carry `NaN` means.
pub fn emit_grid(grid: &GridResult, path: &Path, format: EmitFormat) -> Result<()> {
    let contents = match format {
        EmitFormat::Csv => {
            let mut out =
                String::from("lr,momentum,mean_final_val,std_final_val,diverged_count,n_seeds\n");
            for c in &grid.cells {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    c.lr,
                    c.momentum,
                    fmt_opt(c.mean_final_val),
                    fmt_opt(c.std_final_val),
                    c.diverged_count,
                    c.n_seeds
                ));
            }
            out
        }
        EmitFormat::Jsonl => {
            let mut out = String::new();
            for c in &grid.cells {
                out.push_str(&serde_json::to_string(c).map_err(|e| Error::parse(e.to_string()))?);
                out.push('\n');
            }
            out
        }
    };
    write_file(path, &contents)
}
