//! Shared fixtures: synthetic pipelines, purely random prediction
//! matrices, and deliberately naive oracles that recompute results the
//! slow, obvious way.
#![allow(dead_code)] // not every test target uses every fixture

use epp_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Full pipeline fixture: synthesize -> split -> bag -> validation matrix.
pub fn synthetic_pm(rows: usize, attrs: usize, k: usize, m: usize, seed: u64) -> PredictionMatrix {
    let data = synthesize(rows, attrs, k, seed).unwrap();
    let parts = split(&data, (0.6, 0.2, 0.2), seed ^ 0x5eed).unwrap();
    let pool = fit_bagging(&parts.train, m, &TreeParams::default(), seed ^ 0xba6).unwrap();
    predict_matrix(&pool, &parts.validation).unwrap()
}

/// Prediction matrix with uniformly random entries; exercises vote ties
/// far more often than trained pools do.
pub fn random_pm(m: usize, v: usize, k: usize, seed: u64) -> PredictionMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<usize> = (0..v).map(|_| rng.random_range(0..k)).collect();
    let rows: Vec<Vec<usize>> =
        (0..m).map(|_| (0..v).map(|_| rng.random_range(0..k)).collect()).collect();
    PredictionMatrix::from_rows(rows, labels, k).unwrap()
}

/// Brute-force vote recount, written independently of the production path:
/// hash-map tallies and an explicit (count desc, class asc) sort.
pub fn naive_error_rate(mask: &EnsembleMask, pm: &PredictionMatrix) -> f64 {
    let mut wrong = 0;
    for j in 0..pm.n_examples() {
        let mut tally: HashMap<usize, usize> = HashMap::new();
        for i in mask.ones() {
            *tally.entry(pm.pred(i, j)).or_insert(0) += 1;
        }
        let mut ranked: Vec<(usize, usize)> = tally.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        if ranked[0].0 != pm.labels()[j] {
            wrong += 1;
        }
    }
    wrong as f64 / pm.n_examples() as f64
}

/// Quadratic non-domination filter over every non-empty mask; the even
/// dumber cross-check for `true_pareto_front`.
pub fn naive_front(pm: &PredictionMatrix, mode: ObjectiveMode) -> Vec<ObjectiveVector> {
    let m = pm.n_classifiers();
    assert!(m <= 16, "naive enumeration is for small pools");
    let all: Vec<ObjectiveVector> = (1u32..(1 << m))
        .map(|x| {
            let mask = EnsembleMask::from_bits((0..m).map(|i| (x >> i) & 1 == 1).collect());
            evaluate(&mask, pm, mode).unwrap()
        })
        .collect();
    let mut front: Vec<ObjectiveVector> = Vec::new();
    for v in &all {
        if all.iter().any(|w| w.dominates(v)) {
            continue;
        }
        if !front.contains(v) {
            front.push(*v);
        }
    }
    front
}

/// Objective vectors of an archive as sortable bit patterns.
pub fn objective_set(archive: &ParetoArchive) -> Vec<(u64, u64)> {
    let mut set: Vec<(u64, u64)> = archive
        .iter()
        .map(|e| (e.objectives.o1.to_bits(), e.objectives.o2.to_bits()))
        .collect();
    set.sort_unstable();
    set
}

pub fn vector_set(vectors: &[ObjectiveVector]) -> Vec<(u64, u64)> {
    let mut set: Vec<(u64, u64)> = vectors.iter().map(|v| (v.o1.to_bits(), v.o2.to_bits())).collect();
    set.sort_unstable();
    set
}
