//! Command-line entry point: train, grid, verify, schedule, plot.
//!
//! Exit codes: 0 success (including runs that merely diverged), 1 when a
//! verification check fails, 2 on usage/config errors, 3 on I/O failures.
//! Config files are JSON records mirroring [`RunConfig`]; `--set key=value`
//! overrides apply by dotted path with last-writer-wins, and the
//! `DEMON_OPT_SEED` environment variable overrides the config seed last.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::harness::{
    best_cell, elr_comparison, emit_grid, emit_trace, grid_search, run_training, EmitFormat,
    RunConfig,
};
use crate::plot::{read_csv_table, render_heatmap_svg, render_lines_svg, CsvTable};
use crate::schedules::{schedule_eval, ScheduleKind, ScheduleSpec};
use crate::verify::{
    suite_all, suite_gradients, suite_lemma1, suite_reductions, suite_theorem1, suite_unroll,
    CheckReport,
};

#[derive(Parser)]
#[command(name = "demon-opt", version, about = "Decaying-momentum training toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PlotKind {
    Lines,
    Heatmap,
}

#[derive(Subcommand)]
enum Command {
    /// Run one training experiment from a config file
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for trace.csv and summary.jsonl
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override a config value by dotted path (repeatable), e.g.
        /// --set lr_schedule.init_value=0.03
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Sweep a learning-rate x momentum grid
    Grid {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Comma-separated learning-rate axis
        #[arg(long = "lr-grid", value_delimiter = ',', required = true)]
        lr_grid: Vec<f64>,
        /// Comma-separated momentum axis
        #[arg(long = "momentum-grid", value_delimiter = ',', required = true)]
        momentum_grid: Vec<f64>,
        /// Comma-separated seeds (defaults to the config seed)
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Run verification suites and write checks.jsonl
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Sample schedules into schedule.csv and schedule.svg
    Schedule {
        /// Schedule spec as a JSON record (repeatable to overlay several)
        #[arg(long = "spec", required = true)]
        specs: Vec<String>,
        #[arg(long = "total-iters", default_value_t = 100)]
        total_iters: usize,
        /// Number of evenly spaced sample points (default: total-iters + 1)
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Render an emitted CSV as a self-contained SVG
    Plot {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "lines")]
        kind: PlotKind,
        /// Output SVG path (default: the input with an .svg extension)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the effective-learning-rate comparison from a config file
    Elr {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Momentum coefficient the SGD arm compensates for
        #[arg(long)]
        momentum: f64,
    },
}

/// Parse argv and dispatch; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io { .. } => 3,
                _ => 2,
            }
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Train { config, out, set } => cmd_train(&config, &out, &set),
        Command::Grid {
            config,
            out,
            set,
            lr_grid,
            momentum_grid,
            seeds,
            workers,
        } => cmd_grid(&config, &out, &set, &lr_grid, &momentum_grid, &seeds, workers),
        Command::Verify { suite, out } => cmd_verify(&suite, &out),
        Command::Schedule {
            specs,
            total_iters,
            samples,
            out,
        } => cmd_schedule(&specs, total_iters, samples, &out),
        Command::Plot { input, kind, out } => cmd_plot(&input, kind, out.as_deref()),
        Command::Elr {
            config,
            out,
            set,
            momentum,
        } => cmd_elr(&config, &out, &set, momentum),
    }
}

fn load_config(path: &Path, sets: &[String]) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
    for spec in sets {
        apply_override(&mut value, spec)?;
    }
    if let Ok(seed) = std::env::var("DEMON_OPT_SEED") {
        let seed: u64 = seed
            .parse()
            .map_err(|e| Error::config(format!("DEMON_OPT_SEED: {e}")))?;
        value["seed"] = serde_json::json!(seed);
    }
    let config: RunConfig =
        serde_json::from_value(value).map_err(|e| Error::config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Apply one `key.path=value` override; the value parses as JSON when it
/// can, otherwise as a bare string.
fn apply_override(root: &mut serde_json::Value, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::config(format!("--set expects KEY=VALUE, got {spec:?}")))?;
    let new: serde_json::Value =
        serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    let segments: Vec<&str> = path.split('.').collect();
    let mut cursor = root;
    for (i, seg) in segments.iter().enumerate() {
        if i + 1 == segments.len() {
            match cursor {
                serde_json::Value::Object(map) => {
                    map.insert((*seg).to_string(), new);
                    return Ok(());
                }
                _ => return Err(Error::config(format!("config key {path} is not settable"))),
            }
        }
        cursor = cursor
            .get_mut(*seg)
            .ok_or_else(|| Error::config(format!("unknown config key {path}")))?;
    }
    unreachable!("split never yields an empty segment list")
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn cmd_train(config_path: &Path, out: &Path, sets: &[String]) -> Result<i32> {
    let config = load_config(config_path, sets)?;
    ensure_dir(out)?;
    let trace = run_training(&config)?;
    emit_trace(&trace, &out.join("trace.csv"), EmitFormat::Csv)?;

    let last = trace.rows.last();
    let summary = serde_json::json!({
        "lr": config.lr_schedule.init_value,
        "momentum": config.momentum_schedule.init_value,
        "seed": config.seed,
        "rows": trace.rows.len(),
        "diverged": trace.diverged,
        "final_loss": last.map(|r| r.loss),
        "final_val_metric": last.and_then(|r| r.val_metric),
        "config": config,
    });
    let mut line = serde_json::to_string(&summary).map_err(|e| Error::parse(e.to_string()))?;
    line.push('\n');
    write_text(&out.join("summary.jsonl"), &line)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_grid(
    config_path: &Path,
    out: &Path,
    sets: &[String],
    lr_grid: &[f64],
    momentum_grid: &[f64],
    seeds: &[u64],
    workers: usize,
) -> Result<i32> {
    if workers == 0 {
        return Err(Error::config("--workers must be >= 1"));
    }
    let config = load_config(config_path, sets)?;
    let seeds: Vec<u64> = if seeds.is_empty() {
        vec![config.seed]
    } else {
        seeds.to_vec()
    };
    ensure_dir(out)?;
    let grid = grid_search(&config, lr_grid, momentum_grid, &seeds, workers)?;
    let csv_path = out.join("grid.csv");
    emit_grid(&grid, &csv_path, EmitFormat::Csv)?;
    emit_grid(&grid, &out.join("grid.jsonl"), EmitFormat::Jsonl)?;
    let table = read_csv_table(&csv_path)?;
    write_text(&out.join("heatmap.svg"), &render_heatmap_svg(&table)?)?;
    if let Ok((lr, momentum)) = best_cell(&grid) {
        println!("best cell: lr = {lr}, momentum = {momentum}");
    }
    Ok(0)
}

fn suite_by_name(name: &str) -> Result<Vec<CheckReport>> {
    match name {
        "all" => suite_all(),
        "lemma1" => suite_lemma1(),
        "theorem1" => suite_theorem1(),
        "unroll" => suite_unroll(),
        "gradients" => suite_gradients(),
        "reductions" => suite_reductions(),
        other => Err(Error::config(format!(
            "unknown suite {other:?} (expected all, lemma1, theorem1, unroll, gradients, reductions)"
        ))),
    }
}

fn cmd_verify(suite: &str, out: &Path) -> Result<i32> {
    let reports = suite_by_name(suite)?;
    ensure_dir(out)?;
    let mut jsonl = String::new();
    println!("{:<52} {:>6} {:>13}", "check", "status", "max_rel_err");
    for r in &reports {
        println!(
            "{:<52} {:>6} {:>13.3e}",
            r.check_name,
            if r.passed { "PASS" } else { "FAIL" },
            r.max_rel_error
        );
        jsonl.push_str(&serde_json::to_string(r).map_err(|e| Error::parse(e.to_string()))?);
        jsonl.push('\n');
    }
    write_text(&out.join("checks.jsonl"), &jsonl)?;
    Ok(i32::from(reports.iter().any(|r| !r.passed)))
}

fn cmd_schedule(
    specs: &[String],
    total_iters: usize,
    samples: Option<usize>,
    out: &Path,
) -> Result<i32> {
    if total_iters == 0 {
        return Err(Error::config("--total-iters must be >= 1"));
    }
    let mut parsed: Vec<ScheduleSpec> = Vec::new();
    for s in specs {
        let spec: ScheduleSpec =
            serde_json::from_str(s).map_err(|e| Error::config(format!("--spec {s:?}: {e}")))?;
        spec.validate()?;
        if spec.kind == ScheduleKind::Plateau {
            return Err(Error::config(
                "plateau schedules are stateful and cannot be sampled by iteration",
            ));
        }
        parsed.push(spec);
    }
    let samples = samples.unwrap_or(total_iters + 1).max(2);
    // the theory schedule is defined from t = 1
    let start = if parsed.iter().any(|s| s.kind == ScheduleKind::DemonTheory) {
        1.0
    } else {
        0.0
    };
    let total = total_iters as f64;

    let mut header = vec![String::from("t")];
    if parsed.len() == 1 {
        header.push(String::from("value"));
    } else {
        for i in 0..parsed.len() {
            header.push(format!("value_{i}"));
        }
    }
    let mut csv = header.join(",");
    csv.push('\n');
    let mut rows = Vec::new();
    for i in 0..samples {
        let t = start + (total - start) * i as f64 / (samples - 1) as f64;
        let mut row = vec![Some(t)];
        let mut line = format!("{t}");
        for spec in &parsed {
            let v = schedule_eval(spec, t, total, None)?;
            line.push_str(&format!(",{v}"));
            row.push(Some(v));
        }
        line.push('\n');
        csv.push_str(&line);
        rows.push(row);
    }
    ensure_dir(out)?;
    write_text(&out.join("schedule.csv"), &csv)?;
    let table = CsvTable { header, rows };
    write_text(&out.join("schedule.svg"), &render_lines_svg(&table)?)?;
    Ok(0)
}

fn cmd_plot(input: &Path, kind: PlotKind, out: Option<&Path>) -> Result<i32> {
    let table = read_csv_table(input)?;
    let svg = match kind {
        PlotKind::Lines => render_lines_svg(&table)?,
        PlotKind::Heatmap => render_heatmap_svg(&table)?,
    };
    let out = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| input.with_extension("svg"));
    write_text(&out, &svg)?;
    Ok(0)
}

fn cmd_elr(config_path: &Path, out: &Path, sets: &[String], momentum: f64) -> Result<i32> {
    let config = load_config(config_path, sets)?;
    ensure_dir(out)?;
    let pair = elr_comparison(&config, momentum)?;
    emit_trace(&pair.momentum_trace, &out.join("trace_momentum.csv"), EmitFormat::Csv)?;
    emit_trace(&pair.sgd_trace, &out.join("trace_sgd_elr.csv"), EmitFormat::Csv)?;
    let summary = serde_json::json!({
        "momentum": momentum,
        "elr_factor": 1.0 / (1.0 - momentum),
        "momentum_final_loss": pair.momentum_trace.final_loss(),
        "sgd_elr_final_loss": pair.sgd_trace.final_loss(),
        "momentum_diverged": pair.momentum_trace.diverged,
        "sgd_elr_diverged": pair.sgd_trace.diverged,
        "momentum_config": pair.momentum_config,
        "sgd_config": pair.sgd_config,
    });
    let mut line = serde_json::to_string(&summary).map_err(|e| Error::parse(e.to_string()))?;
    line.push('\n');
    write_text(&out.join("elr_summary.jsonl"), &line)?;
    Ok(0)
}
