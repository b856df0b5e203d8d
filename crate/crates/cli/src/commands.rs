//! The three subcommands.

use std::fs;
use std::io::Write;

use anyhow::{bail, Context, Result};
use epp_core::*;

use crate::args::{BenchmarkArgs, PruneArgs, TrainArgs, Variant};
use crate::bench::{self, mean_std};
use crate::pipeline::{framework_config, prepare, prepare_from_data, prune_once};

/// Trains the pool and writes pool.json plus the validation and test
/// prediction matrices; prints per-tree and full-ensemble errors.
pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    let prepared = prepare_from_data(&args.data, &args.pool)?;
    let pool = prepared.pool.as_ref().expect("training path always builds a pool");
    let pm = &prepared.pm_validation;

    fs::create_dir_all(&args.out)?;
    let pool_file = fs::File::create(args.out.join("pool.json"))?;
    serde_json::to_writer_pretty(&pool_file, pool)?;
    writeln!(&pool_file)?;
    learners::write_matrix_csv_path(pm, args.out.join("pm_validation.csv"))?;
    if let Some(pm_test) = &prepared.pm_test {
        learners::write_matrix_csv_path(pm_test, args.out.join("pm_test.csv"))?;
    }

    let m = pm.n_classifiers();
    println!("pool of {m} trees (validation: {} examples, {} classes)", pm.n_examples(), pm.n_classes());
    for i in 0..m {
        let err = error_rate(&EnsembleMask::from_indices(m, &[i]), pm)?;
        println!("  tree {i:>2}: validation error {err:.4}");
    }
    let full = error_rate(&EnsembleMask::from_bits(vec![true; m]), pm)?;
    println!("full-ensemble validation error: {full:.4}");
    if let Some(pm_test) = &prepared.pm_test {
        let full_test = error_rate(&EnsembleMask::from_bits(vec![true; m]), pm_test)?;
        println!("full-ensemble test error: {full_test:.4}");
    }
    println!("wrote pool.json, pm_validation.csv, pm_test.csv to {}", args.out.display());
    Ok(())
}

fn build_profile(args: &PruneArgs) -> Result<TradeoffProfile> {
    match (&args.alphas, args.alpha_range) {
        (Some(alphas), None) => {
            if let Some(n) = args.n {
                if n != alphas.len() {
                    bail!("--n {} contradicts the {} explicit --alphas", n, alphas.len());
                }
            }
            Ok(TradeoffProfile::new(alphas.clone())?)
        }
        (None, Some((low, high))) => {
            let n = args.n.context("--alpha-range needs --n participants")?;
            Ok(TradeoffProfile::from_range(n, low, high, args.alpha_seed)?)
        }
        (None, None) => bail!("provide trade-off levels: --alphas or --alpha-range with --n"),
        (Some(_), Some(_)) => bail!("--alphas and --alpha-range are mutually exclusive"),
    }
}

/// Prunes once under the chosen variant and writes archive.json and
/// assignments.json; prints the per-participant table.
pub fn cmd_prune(args: &PruneArgs) -> Result<()> {
    let prepared = prepare(&args.data, &args.matrix, &args.pool)?;
    let profile = build_profile(args)?;
    let cfg = framework_config(&args.solver);
    let outcome = prune_once(&prepared.pm_validation, &profile, &cfg, args.variant, args.select)?;

    fs::create_dir_all(&args.out)?;
    let archive_file = fs::File::create(args.out.join("archive.json"))?;
    serde_json::to_writer_pretty(&archive_file, &outcome.archive_records)?;
    writeln!(&archive_file)?;
    let assign_file = fs::File::create(args.out.join("assignments.json"))?;
    outcome.assignment.write_json(assign_file)?;

    println!(
        "{} archive: {} entries; {} participants",
        args.variant.name(),
        outcome.archive_size,
        profile.n()
    );
    println!("{:>4}  {:>8}  {:>7}  {:>4}  {:>8}  mask", "j", "alpha", "error", "size", "loss");
    for (j, s) in outcome.assignment.selections.iter().enumerate() {
        println!(
            "{j:>4}  {:>8.4}  {:>7.4}  {:>4}  {:>8.4}  {}",
            s.alpha,
            s.error,
            s.mask.count_ones(),
            s.loss,
            s.mask
        );
    }
    if let Some(pm_test) = &prepared.pm_test {
        let test = crate::pipeline::mean_loss_on(&outcome.assignment, pm_test)?;
        println!(
            "mean loss: {:.4} (validation), {test:.4} (test)",
            outcome.assignment.mean_loss()
        );
    } else {
        println!("mean loss: {:.4} (validation)", outcome.assignment.mean_loss());
    }
    println!("wrote archive.json, assignments.json to {}", args.out.display());
    Ok(())
}

/// Sweeps participant counts over every requested variant and summarizes
/// timing and loss per configuration.
pub fn cmd_benchmark(args: &BenchmarkArgs) -> Result<()> {
    let prepared = prepare(&args.data, &args.matrix, &args.pool)?;
    let report = bench::run_benchmark(args, &prepared, &args.out)?;

    println!("\nsummary (over {} repetitions):", report.config.repetitions);
    for &variant in &args.variant {
        for &n in &report.config.n_list {
            let times: Vec<f64> = report
                .rows
                .iter()
                .filter(|r| r.variant == variant.name() && r.n == n)
                .map(|r| r.time_ms)
                .collect();
            if times.is_empty() {
                continue;
            }
            let (t_mean, t_std) = mean_std(&times);
            let loss = report
                .rows
                .iter()
                .find(|r| r.variant == variant.name() && r.n == n)
                .map(|r| r.mean_loss)
                .unwrap();
            println!(
                "  {:>4} n={n:<5} time {t_mean:>9.3} ms +- {t_std:>7.3}  mean_loss {loss:.4}",
                variant.name()
            );
        }
    }
    println!("wrote results.csv, report.json to {}", args.out.display());
    Ok(())
}
