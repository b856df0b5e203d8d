//! Scratch calibration probe (not part of the deliverable surface):
//! prints front shapes, oracle-recovery rates, and variant losses.

use epp_core::*;

fn build_pm(rows: usize, attrs: usize, k: usize, m: usize, seed: u64) -> PredictionMatrix {
    let data = synthesize(rows, attrs, k, seed).unwrap();
    let parts = split(&data, (0.6, 0.2, 0.2), seed ^ 0x5eed).unwrap();
    let pool = fit_bagging(&parts.train, m, &TreeParams::default(), seed ^ 0xba6).unwrap();
    predict_matrix(&pool, &parts.validation).unwrap()
}

fn main() {
    // 1. paper-shaped front
    let pm = build_pm(4944, 43, 6, 20, 1);
    let m = pm.n_classifiers();
    println!("== paper-shaped pool: per-tree validation errors ==");
    let singles: Vec<f64> = (0..m)
        .map(|i| error_rate(&EnsembleMask::from_indices(m, &[i]), &pm).unwrap())
        .collect();
    println!("single-tree errors: min {:.3} max {:.3} mean {:.3}",
        singles.iter().cloned().fold(f64::INFINITY, f64::min),
        singles.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        singles.iter().sum::<f64>() / m as f64);
    let full = error_rate(&EnsembleMask::from_bits(vec![true; m]), &pm).unwrap();
    println!("full-ensemble error: {:.3}", full);

    let archive = solve(&pm, &SolverConfig::new(80, 7, ObjectiveMode::Plain)).unwrap();
    let mut pts: Vec<(usize, f64)> = archive.iter().map(|e| (e.size(), e.error)).collect();
    pts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    println!("BF archive after 80 iters (l={}): {:?}", archive.len(), pts);

    // 2. solver oracle recovery rates, criterion-2 budget
    println!("\n== oracle recovery (budget 100 m^2 ln m + 1000) ==");
    for (rows, attrs, k) in [(500usize, 8usize, 3usize), (250, 8, 3), (300, 6, 2), (200, 5, 2)] {
        println!("data {rows}x{attrs} K={k} (v={})", rows / 5);
        for m in [4usize, 6, 8, 10] {
            let budget = (100.0 * (m * m) as f64 * (m as f64).ln() + 1000.0).ceil() as usize;
            let mut hits = 0;
            for seed in 0..20u64 {
                let pm = build_pm(rows, attrs, k, m, 100 + seed);
                let front = true_pareto_front(&pm, ObjectiveMode::Plain).unwrap();
                let got = solve(&pm, &SolverConfig::new(budget, seed, ObjectiveMode::Plain)).unwrap();
                let mut a: Vec<(u64, u64)> =
                    front.iter().map(|e| (e.objectives.o1.to_bits(), e.objectives.o2.to_bits())).collect();
                let mut b: Vec<(u64, u64)> =
                    got.iter().map(|e| (e.objectives.o1.to_bits(), e.objectives.o2.to_bits())).collect();
                a.sort();
                b.sort();
                if a == b {
                    hits += 1;
                }
            }
            println!("  m={m}: budget {budget}, exact recovery {hits}/20");
        }
    }

    // 2b. does E[BF mean loss] converge to E[PEPs mean loss]?
    println!("\n== BF/PEPs expectation check (fixed pm, many solver seeds) ==");
    {
        let pm = build_pm(4944, 43, 6, 20, 10);
        let profile = TradeoffProfile::from_range(80, 0.01, 0.2, 900).unwrap();
        let mut grand = 0.0;
        let runs = 200u64;
        for s in 0..runs {
            let cfg = FrameworkConfig { solver_seed: 1000 + s, ..Default::default() };
            grand += run_framework(&pm, &profile, &cfg, FrameworkKind::Basic)
                .unwrap()
                .assignment
                .mean_loss();
        }
        let cfg = FrameworkConfig { solver_seed: 1000, ..Default::default() };
        let peps = run_peps_baseline(&pm, &profile, &cfg).unwrap();
        println!(
            "BF mean over {runs} solver seeds: {:.4}; PEPs (80 fresh runs): {:.4}",
            grand / runs as f64,
            peps.mean_loss()
        );
    }

    // 3. criterion-5-style pooled comparison: 10 seeds x n in {10,80,640},
    // per-(seed,n) solver seeds shared across variants
    for base in [1_000_000u64, 2_000_000] {
        println!("\n== pooled variant losses, replicate base {base} ==");
        let mut cells: Vec<(f64, f64, f64)> = Vec::new();
        for s in 0..10u64 {
            let pm = build_pm(4944, 43, 6, 20, base + 200 + s);
            for n in [10usize, 80, 640] {
                let profile =
                    TradeoffProfile::from_range(n, 0.01, 0.2, base + 900 + 31 * s + n as u64)
                        .unwrap();
                let cfg = FrameworkConfig {
                    solver_seed: base + 10_000 + 1000 * s + n as u64,
                    ..Default::default()
                };
                let bf = run_framework(&pm, &profile, &cfg, FrameworkKind::Basic).unwrap();
                let omf =
                    run_framework(&pm, &profile, &cfg, FrameworkKind::ObjectiveMixture).unwrap();
                let peps = run_peps_baseline(&pm, &profile, &cfg).unwrap();
                cells.push((
                    bf.assignment.mean_loss(),
                    omf.assignment.mean_loss(),
                    peps.mean_loss(),
                ));
            }
        }
        let k = cells.len() as f64;
        let (bf, omf, peps) = cells.iter().fold((0.0, 0.0, 0.0), |acc, c| {
            (acc.0 + c.0 / k, acc.1 + c.1 / k, acc.2 + c.2 / k)
        });
        let omf_wins = cells.iter().filter(|c| c.1 < c.0).count();
        println!(
            "pooled: BF {bf:.4}  OMF {omf:.4}  PEPs {peps:.4}  OMF/BF {:.3}  BF/PEPs {:.3}  omf<bf cells {}/{}",
            omf / bf,
            bf / peps,
            omf_wins,
            cells.len()
        );
    }
}
