//! The benchmark harness: sweep participant counts, time each variant
//! with a monotonic clock, and emit plot-ready CSV and JSON.
//!
//! Trade-off levels are drawn once per participant count and shared by
//! every variant and repetition, so the BF/OMF/PEPs contrast is paired
//! and the loss columns are identical across repetitions; only timings
//! vary. Dataset loading and pool training happen before any clock
//! starts; a timed run covers exactly one solve-plus-selection.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use epp_core::{learners, TradeoffProfile};

use crate::args::{BenchmarkArgs, SelectKind};
use crate::pipeline::{framework_config, mean_loss_on, prune_once, Prepared};

pub const RESULTS_CSV_HEADER: &str = "variant,n,rep,time_ms,mean_loss,max_loss,archive_size";

/// Everything one benchmark invocation is parameterized by.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub variants: Vec<String>,
    pub n_list: Vec<usize>,
    pub alpha_low: f64,
    pub alpha_high: f64,
    pub alpha_seed: u64,
    pub repetitions: usize,
    pub m: usize,
    pub iterations: usize,
    pub solver_seed: u64,
    pub c_min: f64,
    pub c_max: f64,
    pub select_exact: bool,
}

impl ExperimentConfig {
    pub fn from_args(args: &BenchmarkArgs, m: usize) -> Self {
        Self {
            variants: args.variant.iter().map(|v| v.name().to_string()).collect(),
            n_list: args.n.clone(),
            alpha_low: args.alpha_range.0,
            alpha_high: args.alpha_range.1,
            alpha_seed: args.alpha_seed,
            repetitions: args.repetitions.max(1),
            m,
            iterations: args.solver.iterations,
            solver_seed: args.solver.solver_seed,
            c_min: args.solver.cmin,
            c_max: args.solver.cmax,
            select_exact: args.select == SelectKind::Exact,
        }
    }
}

/// One timed run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRow {
    pub variant: String,
    pub n: usize,
    pub rep: usize,
    pub time_ms: f64,
    pub mean_loss: f64,
    pub max_loss: f64,
    pub archive_size: usize,
    /// Mean combined loss re-evaluated on the test matrix, when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_test_loss: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rows: Vec<BenchRow>,
}

impl ExperimentReport {
    pub fn write_results_csv(&self, mut writer: impl Write) -> Result<()> {
        writeln!(writer, "{RESULTS_CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                writer,
                "{},{},{},{:.3},{},{},{}",
                r.variant, r.n, r.rep, r.time_ms, r.mean_loss, r.max_loss, r.archive_size
            )?;
        }
        Ok(())
    }
}

fn variant_rank(name: &str) -> usize {
    ["bf", "omf", "peps"].iter().position(|v| *v == name).unwrap_or(3)
}

/// Runs the full sweep. Writes per-run artifacts (first repetition only;
/// later repetitions are numerically identical), results.csv, and
/// report.json under `out`.
pub fn run_benchmark(
    args: &BenchmarkArgs,
    prepared: &Prepared,
    out: &Path,
) -> Result<ExperimentReport> {
    fs::create_dir_all(out)?;
    let pm = &prepared.pm_validation;
    let config = ExperimentConfig::from_args(args, pm.n_classifiers());
    let cfg_base = framework_config(&args.solver);

    learners::write_matrix_csv_path(pm, out.join("pm_validation.csv"))?;
    if let Some(pm_test) = &prepared.pm_test {
        learners::write_matrix_csv_path(pm_test, out.join("pm_test.csv"))?;
    }

    // levels drawn once per n, shared across variants and repetitions
    let profiles: Vec<(usize, TradeoffProfile)> = config
        .n_list
        .iter()
        .map(|&n| {
            TradeoffProfile::from_range(
                n,
                config.alpha_low,
                config.alpha_high,
                config.alpha_seed.wrapping_add(n as u64),
            )
            .map(|p| (n, p))
            .map_err(anyhow::Error::from)
        })
        .collect::<Result<_>>()?;

    let run_rep = |rep: usize, export: bool| -> Result<Vec<BenchRow>> {
        let mut rows = Vec::new();
        for (n, profile) in &profiles {
            // one archive realization per participant count
            let cfg = epp_core::FrameworkConfig {
                solver_seed: cfg_base.solver_seed.wrapping_add(*n as u64),
                ..cfg_base.clone()
            };
            for &variant in &args.variant {
                let started = Instant::now();
                let outcome = prune_once(pm, profile, &cfg, variant, args.select)
                    .with_context(|| format!("{} n={n} rep={rep}", variant.name()))?;
                let time_ms = started.elapsed().as_secs_f64() * 1e3;

                let mean_test_loss = prepared
                    .pm_test
                    .as_ref()
                    .map(|t| mean_loss_on(&outcome.assignment, t))
                    .transpose()?;
                let row = BenchRow {
                    variant: variant.name().to_string(),
                    n: *n,
                    rep,
                    time_ms,
                    mean_loss: outcome.assignment.mean_loss(),
                    max_loss: outcome.assignment.max_loss(),
                    archive_size: outcome.archive_size,
                    mean_test_loss,
                };
                println!(
                    "{} n={} rep={}: time_ms={:.3} mean_loss={:.4} max_loss={:.4} l={}",
                    row.variant, row.n, row.rep, row.time_ms, row.mean_loss, row.max_loss,
                    row.archive_size
                );
                if export {
                    let tag = format!("{}_n{}", row.variant, row.n);
                    let archive_file = fs::File::create(out.join(format!("archive_{tag}.json")))?;
                    serde_json::to_writer_pretty(&archive_file, &outcome.archive_records)?;
                    writeln!(&archive_file)?;
                    let f = fs::File::create(out.join(format!("assignments_{tag}.json")))?;
                    outcome.assignment.write_json(f)?;
                }
                rows.push(row);
            }
        }
        Ok(rows)
    };

    let mut rows: Vec<BenchRow> = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    if args.parallel && config.repetitions > 1 {
        let run_rep = &run_rep;
        let results: Vec<Result<Vec<BenchRow>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..config.repetitions)
                .map(|rep| scope.spawn(move || run_rep(rep, rep == 0)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("benchmark thread panicked")).collect()
        });
        for (rep, result) in results.into_iter().enumerate() {
            match result {
                Ok(mut r) => rows.append(&mut r),
                Err(e) => failures.push(format!("repetition {rep}: {e:#}")),
            }
        }
    } else {
        for rep in 0..config.repetitions {
            match run_rep(rep, rep == 0) {
                Ok(mut r) => rows.append(&mut r),
                Err(e) => failures.push(format!("repetition {rep}: {e:#}")),
            }
        }
    }

    rows.sort_by(|a, b| {
        variant_rank(&a.variant)
            .cmp(&variant_rank(&b.variant))
            .then(a.n.cmp(&b.n))
            .then(a.rep.cmp(&b.rep))
    });
    let report = ExperimentReport { config, rows };

    let csv_file = fs::File::create(out.join("results.csv"))?;
    report.write_results_csv(csv_file)?;
    let json_file = fs::File::create(out.join("report.json"))?;
    serde_json::to_writer_pretty(&json_file, &report)?;
    writeln!(&json_file)?;

    if !failures.is_empty() {
        for f in &failures {
            eprintln!("failed: {f}");
        }
        anyhow::bail!("{} of {} repetitions failed", failures.len(), report.config.repetitions);
    }
    Ok(report)
}

/// Mean and standard deviation of a sample.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}
