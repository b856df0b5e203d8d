//! Property tests for the invariants the pipeline is built on.

mod common;

use common::*;
use epp_core::solver::ArchiveEntry;
use epp_core::*;
use proptest::prelude::*;

/// Coordinates drawn from a coarse grid so that ties and equal vectors
/// actually occur.
fn grid_coord() -> impl Strategy<Value = f64> {
    (0u32..6).prop_map(|i| i as f64 * 0.1)
}

fn grid_vector() -> impl Strategy<Value = ObjectiveVector> {
    (grid_coord(), grid_coord()).prop_map(|(a, b)| ObjectiveVector::new(a, b))
}

proptest! {
    /// Dominance is a strict partial order.
    #[test]
    fn dominance_is_a_strict_partial_order(
        a in grid_vector(),
        b in grid_vector(),
        c in grid_vector(),
    ) {
        prop_assert!(!a.dominates(&a));
        if a.dominates(&b) {
            prop_assert!(!b.dominates(&a));
        }
        if a.dominates(&b) && b.dominates(&c) {
            prop_assert!(a.dominates(&c));
        }
    }

    /// The production vote recount agrees with the hash-map oracle,
    /// including tie-heavy random matrices.
    #[test]
    fn error_rate_matches_naive_recount(
        seed in 0u64..5000,
        m in 1usize..=8,
        v in 1usize..=50,
        k in 2usize..=5,
    ) {
        let pm = random_pm(m, v, k, seed);
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed ^ 0xfeed);
        let bits: Vec<bool> = (0..m).map(|_| rng.random_bool(0.5)).collect();
        let mask = EnsembleMask::from_bits(bits);
        prop_assume!(mask.any());
        prop_assert_eq!(error_rate(&mask, &pm).unwrap(), naive_error_rate(&mask, &pm));
    }

    /// Mixture dominance with unit relaxation implies combined-loss
    /// ordering across the whole trade-off band (endpoints included).
    #[test]
    fn mixture_dominance_implies_combined_loss_order(
        seed in 0u64..2000,
        alpha_lo in 0.0f64..0.1,
        width in 0.0f64..0.3,
    ) {
        let alpha_hi = alpha_lo + width;
        let pm = random_pm(6, 20, 3, seed);
        let mode = ObjectiveMode::mixture(alpha_lo, alpha_hi, 1.0, 1.0).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed ^ 0xabcd);
        let draw = |rng: &mut rand::rngs::StdRng| {
            loop {
                let bits: Vec<bool> = (0..6).map(|_| rng.random_bool(0.5)).collect();
                let mask = EnsembleMask::from_bits(bits);
                if mask.any() {
                    return mask;
                }
            }
        };
        let p = draw(&mut rng);
        let q = draw(&mut rng);
        let vp = evaluate(&p, &pm, mode).unwrap();
        let vq = evaluate(&q, &pm, mode).unwrap();
        if vp.dominates(&vq) {
            for step in 0..=10 {
                let alpha = alpha_lo + (alpha_hi - alpha_lo) * step as f64 / 10.0;
                let lp = combined_loss(&p, &pm, alpha).unwrap();
                let lq = combined_loss(&q, &pm, alpha).unwrap();
                prop_assert!(lp <= lq + 1e-12,
                    "alpha={alpha}: dominating mask pays {lp} > {lq}");
            }
        }
    }

    /// Splits are deterministic and partition the rows for any ratio mix.
    #[test]
    fn split_partitions_for_any_ratios(
        seed in 0u64..1000,
        rows in 12usize..120,
        a in 2u32..6,
        b in 1u32..4,
    ) {
        let total = (a + b + 2) as f64;
        let ratios = (a as f64 / total, b as f64 / total, 2.0 / total);
        let data = synthesize(rows, 3, 2, seed).unwrap();
        let s1 = split(&data, ratios, seed).unwrap();
        let s2 = split(&data, ratios, seed).unwrap();
        prop_assert_eq!(s1.train.features(), s2.train.features());
        prop_assert_eq!(s1.test.labels(), s2.test.labels());
        let n = s1.train.n_rows() + s1.validation.n_rows() + s1.test.n_rows();
        prop_assert_eq!(n, rows);
        // sizes within one row of the requested fractions
        prop_assert!((s1.train.n_rows() as f64 - ratios.0 * rows as f64).abs() <= 1.0);
        prop_assert!((s1.validation.n_rows() as f64 - ratios.1 * rows as f64).abs() <= 1.0);
        prop_assert!((s1.test.n_rows() as f64 - ratios.2 * rows as f64).abs() <= 1.0);
    }

    /// Masks survive the bitstring round trip.
    #[test]
    fn mask_bitstring_round_trip(bits in proptest::collection::vec(any::<bool>(), 1..40)) {
        let mask = EnsembleMask::from_bits(bits.clone());
        let back = EnsembleMask::from_bitstring(&mask.to_bitstring()).unwrap();
        prop_assert_eq!(back, mask);
        prop_assert_eq!(bits.iter().filter(|&&x| x).count(),
            EnsembleMask::from_bits(bits).count_ones());
    }

    /// Every vector ever offered to the archive stays weakly covered by
    /// the archive afterwards: progress never regresses.
    #[test]
    fn archive_progress_is_monotone(
        points in proptest::collection::vec((grid_coord(), grid_coord()), 1..60),
    ) {
        let mut archive = ParetoArchive::default();
        let mut seen: Vec<ObjectiveVector> = Vec::new();
        for (i, (o1, o2)) in points.into_iter().enumerate() {
            let objectives = ObjectiveVector::new(o1, o2);
            let entry = ArchiveEntry {
                mask: EnsembleMask::from_indices(8, &[i % 8]),
                objectives,
                error: o1,
                cost: o2,
                born_at: i,
            };
            archive.try_insert(entry);
            seen.push(objectives);
            archive.validate().unwrap();
            for v in &seen {
                prop_assert!(
                    archive.iter().any(|e| e.objectives == *v || e.objectives.dominates(v)),
                    "({}, {}) escaped the archive", v.o1, v.o2
                );
            }
        }
    }
}

/// The plain bi-objective front does not settle combined-loss comparisons:
/// two incomparable front points can each win at some trade-off level.
#[test]
fn plain_nondomination_does_not_order_combined_losses() {
    // the worked matrix: {t3} scores (0.25, 1) and {t1,t2,t3} scores (0, 3)
    let pm = PredictionMatrix::from_rows(
        vec![vec![0, 1, 0, 0], vec![0, 0, 1, 1], vec![1, 1, 1, 0]],
        vec![0, 1, 1, 0],
        2,
    )
    .unwrap();
    let single = EnsembleMask::from_bitstring("001").unwrap();
    let triple = EnsembleMask::from_bitstring("111").unwrap();
    let vs = evaluate(&single, &pm, ObjectiveMode::Plain).unwrap();
    let vt = evaluate(&triple, &pm, ObjectiveMode::Plain).unwrap();
    assert!(!vs.dominates(&vt) && !vt.dominates(&vs), "witness masks must be incomparable");

    // at alpha = 0.2 the singleton wins; at alpha = 0.01 the full ensemble wins
    let high = 0.2;
    let low = 0.01;
    assert!(
        combined_loss(&single, &pm, high).unwrap() < combined_loss(&triple, &pm, high).unwrap()
    );
    assert!(combined_loss(&triple, &pm, low).unwrap() < combined_loss(&single, &pm, low).unwrap());
}

use rand::{Rng, SeedableRng};
