//! The bi-objective solver: an evolutionary archive algorithm that
//! approximates the Pareto-optimal set of ensemble masks, plus an
//! exhaustive enumeration of the true front for small pools.
//!
//! One iteration mutates a uniformly chosen archive member by independent
//! bit flips and inserts the offspring if nothing in the archive dominates
//! it. The archive is mutually non-dominated with unique objective vectors
//! at all times; it can only grow toward the true front, never regress.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::PredictionMatrix;
use crate::objectives::{apply_mode, ensemble_cost, error_rate, EnsembleMask, ObjectiveMode, ObjectiveVector};

/// Largest pool size [`true_pareto_front`] will enumerate (2^20 masks).
pub const ENUMERATION_LIMIT: usize = 20;

/// One archive member: a mask with its score under the solver's mode and
/// the plain measurements behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    pub mask: EnsembleMask,
    pub objectives: ObjectiveVector,
    /// Majority-vote validation error, regardless of mode.
    pub error: f64,
    /// Ensemble cost (cardinality at unit costs), regardless of mode.
    pub cost: f64,
    /// Iteration that produced the entry; the initial mask is 0.
    pub born_at: usize,
}

impl ArchiveEntry {
    pub fn measure(
        mask: EnsembleMask,
        pm: &PredictionMatrix,
        mode: ObjectiveMode,
        costs: Option<&[f64]>,
        born_at: usize,
    ) -> Result<Self> {
        let error = error_rate(&mask, pm)?;
        let cost = ensemble_cost(&mask, costs);
        Ok(Self { mask, objectives: apply_mode(error, cost, mode), error, cost, born_at })
    }

    /// |S| of the underlying mask.
    pub fn size(&self) -> usize {
        self.mask.count_ones()
    }
}

/// Export row for the archive JSON interchange format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArchiveEntryRecord {
    pub mask: String,
    pub error: f64,
    pub size: usize,
    pub o1: f64,
    pub o2: f64,
}

impl From<&ArchiveEntry> for ArchiveEntryRecord {
    fn from(e: &ArchiveEntry) -> Self {
        Self {
            mask: e.mask.to_bitstring(),
            error: e.error,
            size: e.size(),
            o1: e.objectives.o1,
            o2: e.objectives.o2,
        }
    }
}

/// The mutually non-dominated set maintained by the solver.
#[derive(Debug, Clone, Default)]
pub struct ParetoArchive {
    entries: Vec<ArchiveEntry>,
}

impl ParetoArchive {
    /// Wraps pre-scored entries, verifying mutual non-domination and
    /// objective uniqueness.
    pub fn from_entries(entries: Vec<ArchiveEntry>) -> Result<Self> {
        let archive = Self { entries };
        archive.validate()?;
        Ok(archive)
    }

    /// Archive size l.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ArchiveEntry> {
        self.entries.iter()
    }

    /// Inserts `candidate` unless an existing entry dominates it or already
    /// occupies its objective vector (the earlier-born entry is kept).
    /// Every entry the candidate dominates is removed. Returns whether the
    /// candidate was inserted.
    pub fn try_insert(&mut self, candidate: ArchiveEntry) -> bool {
        debug_assert!(candidate.mask.any(), "empty masks never enter the archive");
        let rejected = self.entries.iter().any(|e| {
            e.objectives.dominates(&candidate.objectives) || e.objectives == candidate.objectives
        });
        if rejected {
            return false;
        }
        self.entries.retain(|e| !candidate.objectives.dominates(&e.objectives));
        self.entries.push(candidate);
        #[cfg(debug_assertions)]
        self.validate().expect("archive invariant broken by insertion");
        true
    }

    /// Checks mutual non-domination and objective uniqueness over all pairs.
    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.entries.iter().enumerate() {
            if a.mask.none() {
                return Err(Error::InvalidArchive("entry with empty mask".into()));
            }
            if !(a.objectives.o1.is_finite() && a.objectives.o2.is_finite()) {
                return Err(Error::InvalidArchive("non-finite objective value".into()));
            }
            for b in &self.entries[i + 1..] {
                if a.objectives == b.objectives {
                    return Err(Error::InvalidArchive(format!(
                        "duplicate objective vector ({}, {})",
                        a.objectives.o1, a.objectives.o2
                    )));
                }
                if a.objectives.dominates(&b.objectives) || b.objectives.dominates(&a.objectives) {
                    return Err(Error::InvalidArchive(format!(
                        "entries {} and {} are comparable",
                        a.mask, b.mask
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn records(&self) -> Vec<ArchiveEntryRecord> {
        self.entries.iter().map(ArchiveEntryRecord::from).collect()
    }

    /// Writes the JSON interchange format: an array of
    /// `{mask, error, size, o1, o2}` objects.
    pub fn write_json(&self, mut writer: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut writer, &self.records())
            .map_err(|e| Error::InvalidParameter(format!("archive serialization failed: {e}")))?;
        writeln!(writer)?;
        Ok(())
    }
}

impl<'a> IntoIterator for &'a ParetoArchive {
    type Item = &'a ArchiveEntry;
    type IntoIter = std::slice::Iter<'a, ArchiveEntry>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

/// Solver budget and behavior. `mutation_rate` defaults to 1/m when unset;
/// `costs` replaces unit per-classifier costs when given.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub iterations: usize,
    pub seed: u64,
    pub mode: ObjectiveMode,
    pub mutation_rate: Option<f64>,
    pub costs: Option<Vec<f64>>,
}

impl SolverConfig {
    pub fn new(iterations: usize, seed: u64, mode: ObjectiveMode) -> Self {
        Self { iterations, seed, mode, mutation_rate: None, costs: None }
    }

    pub fn with_mutation_rate(mut self, rate: f64) -> Self {
        self.mutation_rate = Some(rate);
        self
    }

    pub fn with_costs(mut self, costs: Vec<f64>) -> Self {
        self.costs = Some(costs);
        self
    }
}

/// Stepwise solver state, exposed so callers can inspect the archive
/// between iterations; [`solve`] is the one-call wrapper.
pub struct Solver<'a> {
    pm: &'a PredictionMatrix,
    mode: ObjectiveMode,
    costs: Option<Vec<f64>>,
    mutation_rate: f64,
    iterations: usize,
    iteration: usize,
    rng: ChaCha8Rng,
    archive: ParetoArchive,
}

impl<'a> Solver<'a> {
    /// Validates the configuration and seeds the archive with one
    /// uniformly random non-empty mask.
    pub fn new(pm: &'a PredictionMatrix, config: &SolverConfig) -> Result<Self> {
        let m = pm.n_classifiers();
        if m == 0 {
            return Err(Error::EmptyPool);
        }
        if config.iterations == 0 {
            return Err(Error::InvalidParameter("iterations must be >= 1".into()));
        }
        config.mode.validate()?;
        let mutation_rate = config.mutation_rate.unwrap_or(1.0 / m as f64);
        if !(mutation_rate > 0.0 && mutation_rate <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "mutation rate must be in (0, 1], got {mutation_rate}"
            )));
        }
        if let Some(costs) = &config.costs {
            if costs.len() != m {
                return Err(Error::InvalidParameter(format!(
                    "cost vector has {} entries for {m} classifiers",
                    costs.len()
                )));
            }
            if costs.iter().any(|c| !c.is_finite() || *c < 0.0) {
                return Err(Error::InvalidParameter("costs must be finite and >= 0".into()));
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        // uniformly random non-empty mask, by rejection
        let initial = loop {
            let mask = EnsembleMask::from_bits((0..m).map(|_| rng.random_bool(0.5)).collect());
            if mask.any() {
                break mask;
            }
        };
        let mut archive = ParetoArchive::default();
        archive.try_insert(ArchiveEntry::measure(
            initial,
            pm,
            config.mode,
            config.costs.as_deref(),
            0,
        )?);

        Ok(Self {
            pm,
            mode: config.mode,
            costs: config.costs.clone(),
            mutation_rate,
            iterations: config.iterations,
            iteration: 0,
            rng,
            archive,
        })
    }

    pub fn archive(&self) -> &ParetoArchive {
        &self.archive
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn is_done(&self) -> bool {
        self.iteration >= self.iterations
    }

    /// Runs one iteration: mutate a uniformly chosen member and attempt
    /// insertion. Empty offspring are discarded but still consume the
    /// iteration, so the budget is a hard count.
    pub fn step(&mut self) {
        self.iteration += 1;
        let parent = self.rng.random_range(0..self.archive.len());
        let mut child = self.archive.entries()[parent].mask.clone();
        for i in 0..child.len() {
            if self.rng.random_bool(self.mutation_rate) {
                child.flip(i);
            }
        }
        if child.none() {
            return;
        }
        let entry = ArchiveEntry::measure(child, self.pm, self.mode, self.costs.as_deref(), self.iteration)
            .expect("non-empty offspring always measures");
        self.archive.try_insert(entry);
    }

    /// Steps through the remaining budget and returns the archive.
    pub fn run(mut self) -> ParetoArchive {
        while !self.is_done() {
            self.step();
        }
        self.archive
    }
}

/// Approximates the Pareto-optimal set of non-empty masks under
/// `config.mode`. Deterministic: identical inputs give identical archives.
pub fn solve(pm: &PredictionMatrix, config: &SolverConfig) -> Result<ParetoArchive> {
    Ok(Solver::new(pm, config)?.run())
}

/// Exhaustively enumerates all 2^m - 1 non-empty masks and returns the
/// exact Pareto front, collapsing objective duplicates to the
/// lexicographically smallest mask. This is the solver's test oracle and
/// deliberately shares none of its insertion machinery: the front falls
/// out of a sort and a single min-sweep.
pub fn true_pareto_front(pm: &PredictionMatrix, mode: ObjectiveMode) -> Result<ParetoArchive> {
    let m = pm.n_classifiers();
    if m == 0 {
        return Err(Error::EmptyPool);
    }
    if m > ENUMERATION_LIMIT {
        return Err(Error::PoolTooLarge { got: m, limit: ENUMERATION_LIMIT });
    }
    mode.validate()?;

    // Bit m-1-i of the counter drives mask position i, so counting up
    // visits masks in bitstring-lexicographic order.
    let mut scored = Vec::with_capacity((1usize << m) - 1);
    for x in 1u64..(1u64 << m) {
        let mask = EnsembleMask::from_bits((0..m).map(|i| (x >> (m - 1 - i)) & 1 == 1).collect());
        scored.push(ArchiveEntry::measure(mask, pm, mode, None, 0)?);
    }
    scored.sort_by(|a, b| {
        a.objectives
            .o1
            .total_cmp(&b.objectives.o1)
            .then(a.objectives.o2.total_cmp(&b.objectives.o2))
            .then(a.mask.cmp(&b.mask))
    });

    let mut front: Vec<ArchiveEntry> = Vec::new();
    let mut best_o2 = f64::INFINITY;
    let mut i = 0;
    while i < scored.len() {
        // first entry of each o1 group has minimal o2 (and the lex-smallest
        // mask among duplicates); the rest of the group is dominated
        let group_o1 = scored[i].objectives.o1;
        if scored[i].objectives.o2 < best_o2 {
            best_o2 = scored[i].objectives.o2;
            front.push(scored[i].clone());
        }
        while i < scored.len() && scored[i].objectives.o1 == group_o1 {
            i += 1;
        }
    }
    ParetoArchive::from_entries(front)
}
