//! Personalized selection: map each participant's trade-off level to a
//! pruned ensemble drawn from the Pareto archive.
//!
//! Two selectors are shipped. [`select_sorted`] is the sorted two-pointer
//! sweep: archive descending by size, trade-off levels ascending, and a
//! forward-only pointer that advances while the next (smaller) ensemble is
//! no worse for the current level — O(n log n + l log l). Its
//! adjacent-comparison rule is local, so on a non-convex front it can stop
//! short of the global argmin; [`select_exact`] is the O(n*l) full scan
//! that serves as its correctness oracle and is exposed as a CLI option.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::PredictionMatrix;
use crate::objectives::ObjectiveMode;
use crate::solver::{solve, ArchiveEntry, ParetoArchive, SolverConfig};

/// The participants' trade-off levels A = (alpha_1 ... alpha_n).
#[derive(Debug, Clone)]
pub struct TradeoffProfile {
    alphas: Vec<f64>,
}

impl TradeoffProfile {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidParameter("profile needs at least one participant".into()));
        }
        if alphas.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidParameter("trade-off levels must be finite and >= 0".into()));
        }
        Ok(Self { alphas })
    }

    /// n levels drawn uniformly from [low, high] with a seeded PRNG.
    pub fn from_range(n: usize, low: f64, high: f64, seed: u64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite()) || low < 0.0 || high < low {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= low <= high (got {low}, {high})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new((0..n).map(|_| rng.random_range(low..=high)).collect())
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn min(&self) -> f64 {
        self.alphas.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.alphas.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// One participant's assigned ensemble.
#[derive(Debug, Clone)]
pub struct Selection {
    pub alpha: f64,
    pub mask: crate::objectives::EnsembleMask,
    pub error: f64,
    pub cost: f64,
    /// Plain combined loss error + alpha * cost, whatever mode the archive
    /// was solved under.
    pub loss: f64,
}

/// Per-participant selections, indexed by original participant order.
#[derive(Debug, Clone)]
pub struct Assignment {
    pub selections: Vec<Selection>,
}

impl Assignment {
    pub fn mean_loss(&self) -> f64 {
        self.selections.iter().map(|s| s.loss).sum::<f64>() / self.selections.len() as f64
    }

    pub fn max_loss(&self) -> f64 {
        self.selections.iter().map(|s| s.loss).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn records(&self) -> Vec<SelectionRecord> {
        self.selections
            .iter()
            .enumerate()
            .map(|(j, s)| SelectionRecord {
                participant: j,
                alpha: s.alpha,
                mask: s.mask.to_bitstring(),
                error: s.error,
                size: s.mask.count_ones(),
                loss: s.loss,
            })
            .collect()
    }

    /// Writes the JSON interchange format: an array of
    /// `{participant, alpha, mask, error, size, loss}` objects.
    pub fn write_json(&self, mut writer: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut writer, &self.records())
            .map_err(|e| Error::InvalidParameter(format!("assignment serialization failed: {e}")))?;
        writeln!(writer)?;
        Ok(())
    }
}

/// Export row for the assignment JSON interchange format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub participant: usize,
    pub alpha: f64,
    pub mask: String,
    pub error: f64,
    pub size: usize,
    pub loss: f64,
}

fn selection_from(entry: &ArchiveEntry, alpha: f64) -> Selection {
    Selection {
        alpha,
        mask: entry.mask.clone(),
        error: entry.error,
        cost: entry.cost,
        loss: entry.error + alpha * entry.cost,
    }
}

/// Archive order used by the sorted selector: size descending, then error
/// ascending, then bitstring, so equal-size ties resolve deterministically.
fn size_descending(archive: &ParetoArchive) -> Vec<&ArchiveEntry> {
    let mut sorted: Vec<&ArchiveEntry> = archive.iter().collect();
    sorted.sort_by(|a, b| {
        b.cost
            .total_cmp(&a.cost)
            .then(a.error.total_cmp(&b.error))
            .then(a.mask.cmp(&b.mask))
    });
    sorted
}

/// Sorted two-pointer selection.
///
/// The pointer advances while the next entry's combined loss is <= the
/// current one's, so equal-loss ties resolve toward the smaller ensemble.
/// It never moves back: larger trade-off levels only ever prefer smaller
/// ensembles, which is what makes the single sweep sound.
pub fn select_sorted(archive: &ParetoArchive, profile: &TradeoffProfile) -> Result<Assignment> {
    if archive.is_empty() {
        return Err(Error::EmptyArchive);
    }
    let entries = size_descending(archive);
    let l = entries.len();

    let mut order: Vec<usize> = (0..profile.n()).collect();
    order.sort_by(|&a, &b| profile.alphas()[a].total_cmp(&profile.alphas()[b]));

    let loss = |e: &ArchiveEntry, alpha: f64| e.error + alpha * e.cost;
    let mut selections: Vec<Option<Selection>> = vec![None; profile.n()];
    let mut i = 0;
    for &j in &order {
        let alpha = profile.alphas()[j];
        while i + 1 < l && loss(entries[i + 1], alpha) <= loss(entries[i], alpha) {
            i += 1;
        }
        selections[j] = Some(selection_from(entries[i], alpha));
    }
    Ok(Assignment { selections: selections.into_iter().map(Option::unwrap).collect() })
}

/// Exact per-participant argmin over the whole archive, ties toward the
/// smaller ensemble and then the lexicographically smaller mask.
pub fn select_exact(archive: &ParetoArchive, profile: &TradeoffProfile) -> Result<Assignment> {
    if archive.is_empty() {
        return Err(Error::EmptyArchive);
    }
    let selections = profile
        .alphas()
        .iter()
        .map(|&alpha| {
            let best = archive
                .iter()
                .min_by(|a, b| {
                    let la = a.error + alpha * a.cost;
                    let lb = b.error + alpha * b.cost;
                    la.total_cmp(&lb).then(a.cost.total_cmp(&b.cost)).then(a.mask.cmp(&b.mask))
                })
                .expect("archive is non-empty");
            selection_from(best, alpha)
        })
        .collect();
    Ok(Assignment { selections })
}

/// Which objective the framework's single solver run optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameworkKind {
    /// Plain bi-objective (E(S), |S|).
    Basic,
    /// Objective mixture over the profile's [min, max] trade-off range.
    ObjectiveMixture,
}

/// Knobs shared by the framework variants and the per-participant
/// baseline. Relaxation factors apply to the mixture variant only.
#[derive(Debug, Clone)]
pub struct FrameworkConfig {
    pub iterations: usize,
    pub solver_seed: u64,
    pub mutation_rate: Option<f64>,
    pub c_min: f64,
    pub c_max: f64,
}

impl Default for FrameworkConfig {
    fn default() -> Self {
        Self { iterations: 80, solver_seed: 0, mutation_rate: None, c_min: 0.3, c_max: 1.7 }
    }
}

impl FrameworkConfig {
    /// The objective a framework run optimizes for this profile: plain, or
    /// the mixture over [min alpha, max alpha] with the configured
    /// relaxation factors.
    pub fn mode(&self, kind: FrameworkKind, profile: &TradeoffProfile) -> Result<ObjectiveMode> {
        match kind {
            FrameworkKind::Basic => Ok(ObjectiveMode::Plain),
            FrameworkKind::ObjectiveMixture => {
                ObjectiveMode::mixture(profile.min(), profile.max(), self.c_min, self.c_max)
            }
        }
    }

    /// The solver configuration a framework run uses under `seed`.
    pub fn solver_config(&self, seed: u64, mode: ObjectiveMode) -> SolverConfig {
        SolverConfig {
            iterations: self.iterations,
            seed,
            mode,
            mutation_rate: self.mutation_rate,
            costs: None,
        }
    }
}

/// A framework run: the archive the solver produced and the selections
/// drawn from it.
#[derive(Debug, Clone)]
pub struct FrameworkRun {
    pub archive: ParetoArchive,
    pub assignment: Assignment,
}

/// One solver run followed by sorted selection. The basic variant solves
/// the plain bi-objective; the mixture variant folds the profile's
/// [min, max] range and the configured relaxation factors into the
/// objectives. Reported losses are always the plain combined loss.
pub fn run_framework(
    pm: &PredictionMatrix,
    profile: &TradeoffProfile,
    config: &FrameworkConfig,
    kind: FrameworkKind,
) -> Result<FrameworkRun> {
    let mode = config.mode(kind, profile)?;
    let archive = solve(pm, &config.solver_config(config.solver_seed, mode))?;
    let assignment = select_sorted(&archive, profile)?;
    Ok(FrameworkRun { archive, assignment })
}

/// The baseline that runs the bi-objective pruner once per participant:
/// run j solves the plain (E, |S|) objectives under seed
/// `solver_seed + j` and takes the entry of its own archive minimizing
/// E + alpha_j * |S| (ties toward the smaller ensemble, then the
/// lexicographically smaller mask). Total cost is n solver runs, which is
/// the linear-in-n baseline the framework's single run is measured
/// against.
pub fn run_peps_baseline(
    pm: &PredictionMatrix,
    profile: &TradeoffProfile,
    config: &FrameworkConfig,
) -> Result<Assignment> {
    let selections = profile
        .alphas()
        .iter()
        .enumerate()
        .map(|(j, &alpha)| {
            let seed = config.solver_seed.wrapping_add(j as u64);
            let archive = solve(pm, &config.solver_config(seed, ObjectiveMode::Plain))?;
            let best = archive
                .iter()
                .min_by(|a, b| {
                    let la = a.error + alpha * a.cost;
                    let lb = b.error + alpha * b.cost;
                    la.total_cmp(&lb).then(a.cost.total_cmp(&b.cost)).then(a.mask.cmp(&b.mask))
                })
                .expect("solver archives are never empty");
            Ok(selection_from(best, alpha))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Assignment { selections })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{EnsembleMask, ObjectiveVector};
    use approx::assert_relative_eq;

    /// Builds a plain-mode archive from (error, size) points; masks select
    /// the first `size` classifiers of a pool of 8.
    pub(crate) fn front(points: &[(f64, usize)]) -> ParetoArchive {
        let entries = points
            .iter()
            .map(|&(error, size)| {
                let indices: Vec<usize> = (0..size).collect();
                ArchiveEntry {
                    mask: EnsembleMask::from_indices(8, &indices),
                    objectives: ObjectiveVector::new(error, size as f64),
                    error,
                    cost: size as f64,
                    born_at: 0,
                }
            })
            .collect();
        ParetoArchive::from_entries(entries).unwrap()
    }

    /// Frozen from exhaustive argmin over the three-entry front at each
    /// level: alpha 0.01 -> (0.10, 6), alpha 0.05 -> (0.15, 3),
    /// alpha 0.2 -> (0.30, 1), with losses 0.16, 0.30, 0.50.
    #[test]
    fn worked_three_entry_front() {
        let archive = front(&[(0.10, 6), (0.15, 3), (0.30, 1)]);
        let profile = TradeoffProfile::new(vec![0.01, 0.05, 0.2]).unwrap();
        for assignment in [
            select_sorted(&archive, &profile).unwrap(),
            select_exact(&archive, &profile).unwrap(),
        ] {
            let losses: Vec<f64> = assignment.selections.iter().map(|s| s.loss).collect();
            assert_relative_eq!(losses[0], 0.16);
            assert_relative_eq!(losses[1], 0.30);
            assert_relative_eq!(losses[2], 0.50);
            let sizes: Vec<usize> =
                assignment.selections.iter().map(|s| s.mask.count_ones()).collect();
            assert_eq!(sizes, vec![6, 3, 1]);
        }
    }

    #[test]
    fn single_entry_archive_leaves_no_choice() {
        let archive = front(&[(0.2, 4)]);
        let profile = TradeoffProfile::new(vec![0.1]).unwrap();
        let a = select_sorted(&archive, &profile).unwrap();
        assert_relative_eq!(a.selections[0].loss, 0.2 + 0.1 * 4.0);
    }

    #[test]
    fn zero_alpha_selects_minimum_error() {
        let archive = front(&[(0.10, 6), (0.15, 3), (0.30, 1)]);
        let profile = TradeoffProfile::new(vec![0.0]).unwrap();
        let a = select_exact(&archive, &profile).unwrap();
        assert_relative_eq!(a.selections[0].error, 0.10);
        assert_eq!(a.selections[0].mask.count_ones(), 6);
    }

    #[test]
    fn huge_alpha_selects_minimum_size() {
        let archive = front(&[(0.10, 6), (0.15, 3), (0.30, 1)]);
        let profile = TradeoffProfile::new(vec![1e6]).unwrap();
        let a = select_exact(&archive, &profile).unwrap();
        assert_eq!(a.selections[0].mask.count_ones(), 1);
    }

    #[test]
    fn equal_loss_ties_advance_to_the_smaller_ensemble() {
        // at alpha = 0.05 both entries cost exactly 0.45
        let archive = front(&[(0.10, 7), (0.25, 4)]);
        let profile = TradeoffProfile::new(vec![0.05]).unwrap();
        let sorted = select_sorted(&archive, &profile).unwrap();
        assert_eq!(sorted.selections[0].mask.count_ones(), 4);
        let exact = select_exact(&archive, &profile).unwrap();
        assert_eq!(exact.selections[0].mask.count_ones(), 4);
    }

    #[test]
    fn empty_archive_is_an_error() {
        let archive = ParetoArchive::default();
        let profile = TradeoffProfile::new(vec![0.1]).unwrap();
        assert!(matches!(select_sorted(&archive, &profile), Err(Error::EmptyArchive)));
        assert!(matches!(select_exact(&archive, &profile), Err(Error::EmptyArchive)));
    }

    #[test]
    fn permuting_participants_permutes_assignments() {
        let archive = front(&[(0.05, 7), (0.12, 4), (0.2, 2), (0.4, 1)]);
        let forward = TradeoffProfile::new(vec![0.01, 0.07, 0.3]).unwrap();
        let backward = TradeoffProfile::new(vec![0.3, 0.07, 0.01]).unwrap();
        for select in [select_sorted, select_exact] {
            let f = select(&archive, &forward).unwrap();
            let b = select(&archive, &backward).unwrap();
            for (x, y) in f.selections.iter().zip(b.selections.iter().rev()) {
                assert_eq!(x.mask, y.mask);
                assert_eq!(x.loss, y.loss);
            }
        }
    }

    #[test]
    fn assigned_sizes_shrink_as_alpha_grows() {
        let archive = front(&[(0.02, 8), (0.05, 6), (0.11, 4), (0.18, 2), (0.4, 1)]);
        let profile = TradeoffProfile::from_range(25, 0.0, 0.5, 3).unwrap();
        let assignment = select_sorted(&archive, &profile).unwrap();
        let mut by_alpha: Vec<(f64, usize)> = assignment
            .selections
            .iter()
            .map(|s| (s.alpha, s.mask.count_ones()))
            .collect();
        by_alpha.sort_by(|a, b| a.0.total_cmp(&b.0));
        for pair in by_alpha.windows(2) {
            assert!(pair[1].1 <= pair[0].1, "sizes must be non-increasing over alpha");
        }
    }

    #[test]
    fn profile_validation() {
        assert!(TradeoffProfile::new(vec![]).is_err());
        assert!(TradeoffProfile::new(vec![-0.1]).is_err());
        assert!(TradeoffProfile::new(vec![f64::NAN]).is_err());
        assert!(TradeoffProfile::from_range(5, 0.2, 0.1, 1).is_err());
        let p = TradeoffProfile::from_range(100, 0.01, 0.2, 1).unwrap();
        assert!(p.alphas().iter().all(|&a| (0.01..=0.2).contains(&a)));
        assert_eq!(p.n(), 100);
        // deterministic for a fixed seed
        let q = TradeoffProfile::from_range(100, 0.01, 0.2, 1).unwrap();
        assert_eq!(p.alphas(), q.alphas());
    }

    #[test]
    fn assignment_json_has_the_interchange_fields() {
        let archive = front(&[(0.10, 6), (0.30, 1)]);
        let profile = TradeoffProfile::new(vec![0.1, 0.02]).unwrap();
        let assignment = select_sorted(&archive, &profile).unwrap();
        let mut buf = Vec::new();
        assignment.write_json(&mut buf).unwrap();
        let parsed: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let rows = parsed.as_array().unwrap();
        assert_eq!(rows.len(), 2);
        for (j, row) in rows.iter().enumerate() {
            assert_eq!(row["participant"], j);
            for field in ["alpha", "mask", "error", "size", "loss"] {
                assert!(row.get(field).is_some(), "missing field {field}");
            }
        }
    }
}
