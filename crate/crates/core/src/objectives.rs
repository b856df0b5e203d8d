//! Ensemble masks and the bi-objective they are optimized under:
//! majority-vote error E(S), ensemble cost |S|, the combined loss
//! E(S) + alpha * |S|, Pareto dominance, and the objective-mixture
//! transform that folds a known trade-off range into both coordinates.

use std::fmt;

use crate::error::{Error, Result};
use crate::learners::PredictionMatrix;

/// Boolean selection vector over a pool of m classifiers.
///
/// Ordering is lexicographic on the bitstring ("0" < "1"), which is the tie
/// order used wherever two masks score identically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnsembleMask {
    bits: Vec<bool>,
}

impl EnsembleMask {
    /// All-false mask over a pool of size m.
    pub fn new(m: usize) -> Self {
        Self { bits: vec![false; m] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn from_indices(m: usize, indices: &[usize]) -> Self {
        let mut mask = Self::new(m);
        for &i in indices {
            mask.set(i, true);
        }
        mask
    }

    /// Parses a bitstring like "0101"; position i selects classifier i.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::MalformedMask("empty bitstring".into()));
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::MalformedMask(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(Self::from_bits)
    }

    pub fn to_bitstring(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// Pool size m.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    /// Cardinality |S|.
    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// True when at least one classifier is selected.
    pub fn any(&self) -> bool {
        self.bits.iter().any(|&b| b)
    }

    /// True for the infeasible empty ensemble.
    pub fn none(&self) -> bool {
        !self.any()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    /// Indices of selected classifiers, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter_map(|(i, &b)| b.then_some(i))
    }
}

impl fmt::Display for EnsembleMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

/// A point in bi-objective space; smaller is better in both coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveVector {
    pub o1: f64,
    pub o2: f64,
}

impl ObjectiveVector {
    pub fn new(o1: f64, o2: f64) -> Self {
        Self { o1, o2 }
    }

    /// Pareto dominance: no worse in both coordinates and strictly better
    /// in at least one. Exact comparison, no tolerance.
    pub fn dominates(&self, other: &ObjectiveVector) -> bool {
        self.o1 <= other.o1
            && self.o2 <= other.o2
            && (self.o1 < other.o1 || self.o2 < other.o2)
    }
}

/// How a mask is scored into an [`ObjectiveVector`].
///
/// `Plain` is the untweaked pair (E(S), cost(S)). `Mixture` folds a known
/// participant trade-off range [alpha_min, alpha_max] into both
/// coordinates, optionally widened by multiplicative relaxation factors
/// c_min <= 1 <= c_max, which concentrates the search on the region any
/// participant could actually select.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveMode {
    Plain,
    Mixture { alpha_min: f64, alpha_max: f64, c_min: f64, c_max: f64 },
}

impl ObjectiveMode {
    /// Validated mixture mode.
    pub fn mixture(alpha_min: f64, alpha_max: f64, c_min: f64, c_max: f64) -> Result<Self> {
        let mode = ObjectiveMode::Mixture { alpha_min, alpha_max, c_min, c_max };
        mode.validate()?;
        Ok(mode)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ObjectiveMode::Plain => Ok(()),
            ObjectiveMode::Mixture { alpha_min, alpha_max, c_min, c_max } => {
                let all_finite =
                    [alpha_min, alpha_max, c_min, c_max].iter().all(|v| v.is_finite());
                if !all_finite || alpha_min < 0.0 || alpha_max < alpha_min {
                    return Err(Error::InvalidParameter(format!(
                        "mixture needs 0 <= alpha_min <= alpha_max (got {alpha_min}, {alpha_max})"
                    )));
                }
                if c_min > 1.0 || c_max < 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "relaxation factors need c_min <= 1 <= c_max (got {c_min}, {c_max})"
                    )));
                }
                if c_min * alpha_min > c_max * alpha_max {
                    return Err(Error::InvalidParameter(
                        "mixture needs c_min*alpha_min <= c_max*alpha_max".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Majority-vote error rate of the selected sub-ensemble on the validation
/// matrix: plurality vote per example, ties toward the lowest class index.
pub fn error_rate(mask: &EnsembleMask, pm: &PredictionMatrix) -> Result<f64> {
    assert_eq!(mask.len(), pm.n_classifiers(), "mask length must equal pool size");
    if mask.none() {
        return Err(Error::EmptyMask);
    }
    let selected: Vec<usize> = mask.ones().collect();
    let k = pm.n_classes();
    let v = pm.n_examples();
    let labels = pm.labels();
    let mut counts = vec![0u32; k];
    let mut wrong = 0usize;
    for j in 0..v {
        counts.fill(0);
        for &i in &selected {
            counts[pm.pred(i, j)] += 1;
        }
        let mut winner = 0usize;
        let mut best = counts[0];
        for (c, &count) in counts.iter().enumerate().skip(1) {
            if count > best {
                best = count;
                winner = c;
            }
        }
        if winner != labels[j] {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / v as f64)
}

/// Ensemble evaluation cost: |S| at unit costs, or the sum of the selected
/// classifiers' weights when a per-classifier cost vector is supplied.
pub fn ensemble_cost(mask: &EnsembleMask, costs: Option<&[f64]>) -> f64 {
    match costs {
        None => mask.count_ones() as f64,
        Some(w) => {
            debug_assert_eq!(w.len(), mask.len());
            mask.ones().map(|i| w[i]).sum()
        }
    }
}

/// The combined loss E(S) + alpha * |S| a participant at trade-off level
/// `alpha` pays for the sub-ensemble.
pub fn combined_loss(mask: &EnsembleMask, pm: &PredictionMatrix, alpha: f64) -> Result<f64> {
    debug_assert!(alpha >= 0.0 && alpha.is_finite());
    Ok(error_rate(mask, pm)? + alpha * mask.count_ones() as f64)
}

/// Scores a mask under the given mode at unit costs.
pub fn evaluate(mask: &EnsembleMask, pm: &PredictionMatrix, mode: ObjectiveMode) -> Result<ObjectiveVector> {
    evaluate_with_costs(mask, pm, mode, None)
}

/// Scores a mask under the given mode, with an optional per-classifier
/// cost vector replacing unit costs.
pub fn evaluate_with_costs(
    mask: &EnsembleMask,
    pm: &PredictionMatrix,
    mode: ObjectiveMode,
    costs: Option<&[f64]>,
) -> Result<ObjectiveVector> {
    let error = error_rate(mask, pm)?;
    let cost = ensemble_cost(mask, costs);
    Ok(apply_mode(error, cost, mode))
}

/// Maps a (error, cost) measurement into objective space under `mode`.
pub fn apply_mode(error: f64, cost: f64, mode: ObjectiveMode) -> ObjectiveVector {
    match mode {
        ObjectiveMode::Plain => ObjectiveVector::new(error, cost),
        ObjectiveMode::Mixture { alpha_min, alpha_max, c_min, c_max } => ObjectiveVector::new(
            error + c_min * alpha_min * cost,
            error + c_max * alpha_max * cost,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// labels [0,1,1,0]; t1=[0,1,0,0], t2=[0,0,1,1], t3=[1,1,1,0]
    pub(crate) fn example_matrix() -> PredictionMatrix {
        PredictionMatrix::from_rows(
            vec![vec![0, 1, 0, 0], vec![0, 0, 1, 1], vec![1, 1, 1, 0]],
            vec![0, 1, 1, 0],
            2,
        )
        .unwrap()
    }

    #[test]
    fn full_ensemble_votes_perfectly() {
        let pm = example_matrix();
        let mask = EnsembleMask::from_bits(vec![true, true, true]);
        assert_eq!(error_rate(&mask, &pm).unwrap(), 0.0);
    }

    #[test]
    fn tied_votes_break_to_lowest_class() {
        let pm = example_matrix();
        let mask = EnsembleMask::from_bits(vec![true, true, false]);
        // samples 1 and 2 tie {0,1} -> vote 0, both truly class 1
        assert_eq!(error_rate(&mask, &pm).unwrap(), 0.5);
    }

    #[test]
    fn singleton_mask_recovers_raw_classifier_error() {
        let pm = example_matrix();
        let singles: Vec<f64> = (0..3)
            .map(|i| error_rate(&EnsembleMask::from_indices(3, &[i]), &pm).unwrap())
            .collect();
        assert_eq!(singles, vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn empty_mask_is_infeasible() {
        let pm = example_matrix();
        let mask = EnsembleMask::new(3);
        assert!(matches!(error_rate(&mask, &pm), Err(Error::EmptyMask)));
        assert!(matches!(combined_loss(&mask, &pm, 0.1), Err(Error::EmptyMask)));
        assert!(matches!(evaluate(&mask, &pm, ObjectiveMode::Plain), Err(Error::EmptyMask)));
    }

    #[test]
    fn combined_loss_at_zero_alpha_is_the_error() {
        let pm = example_matrix();
        let mask = EnsembleMask::from_indices(3, &[0]);
        assert_eq!(combined_loss(&mask, &pm, 0.0).unwrap(), 0.25);
    }

    #[test]
    fn combined_loss_substitutes_directly() {
        // E = 0.2, |S| = 4, alpha = 0.1 -> 0.6
        assert_relative_eq!(0.2 + 0.1 * 4.0, 0.6);
        let pm = example_matrix();
        let mask = EnsembleMask::from_bits(vec![true, true, true]);
        assert_relative_eq!(combined_loss(&mask, &pm, 0.1).unwrap(), 0.0 + 0.1 * 3.0);
    }

    #[test]
    fn plain_evaluation_is_error_and_size() {
        let v = apply_mode(0.2, 4.0, ObjectiveMode::Plain);
        assert_eq!(v, ObjectiveVector::new(0.2, 4.0));
    }

    #[test]
    fn mixture_without_relaxation() {
        let mode = ObjectiveMode::mixture(0.01, 0.2, 1.0, 1.0).unwrap();
        let v = apply_mode(0.2, 4.0, mode);
        assert_relative_eq!(v.o1, 0.24);
        assert_relative_eq!(v.o2, 1.0);
    }

    #[test]
    fn mixture_with_reference_relaxation_factors() {
        let mode = ObjectiveMode::mixture(0.01, 0.2, 0.3, 1.7).unwrap();
        let v = apply_mode(0.2, 4.0, mode);
        assert_relative_eq!(v.o1, 0.212);
        assert_relative_eq!(v.o2, 1.56);
    }

    #[test]
    fn mixture_validation_rejects_bad_parameters() {
        assert!(ObjectiveMode::mixture(0.2, 0.1, 1.0, 1.0).is_err());
        assert!(ObjectiveMode::mixture(-0.1, 0.2, 1.0, 1.0).is_err());
        assert!(ObjectiveMode::mixture(0.1, 0.2, 1.5, 2.0).is_err());
        assert!(ObjectiveMode::mixture(0.1, 0.2, 0.5, 0.9).is_err());
        assert!(ObjectiveMode::mixture(0.1, 0.2, 0.3, 1.7).is_ok());
    }

    #[test]
    fn dominance_definition() {
        let a = ObjectiveVector::new(0.2, 3.0);
        let b = ObjectiveVector::new(0.3, 5.0);
        let c = ObjectiveVector::new(0.1, 5.0);
        assert!(a.dominates(&b));
        assert!(!a.dominates(&c));
        assert!(!c.dominates(&a));
        // equal vectors do not dominate: one strict inequality is required
        assert!(!a.dominates(&a.clone()));
    }

    #[test]
    fn adding_a_classifier_moves_cost_by_one() {
        let pm = example_matrix();
        let mut mask = EnsembleMask::from_indices(3, &[0]);
        let before = evaluate(&mask, &pm, ObjectiveMode::Plain).unwrap();
        mask.set(2, true);
        let after = evaluate(&mask, &pm, ObjectiveMode::Plain).unwrap();
        assert_eq!(after.o2, before.o2 + 1.0);
        assert!((after.o1 - before.o1).abs() <= 1.0);
    }

    #[test]
    fn per_classifier_costs_replace_cardinality() {
        let costs = [0.5, 2.0, 1.0];
        let mask = EnsembleMask::from_indices(3, &[0, 2]);
        assert_relative_eq!(ensemble_cost(&mask, Some(&costs)), 1.5);
        assert_relative_eq!(ensemble_cost(&mask, None), 2.0);
    }

    #[test]
    fn bitstring_round_trip() {
        let mask = EnsembleMask::from_bitstring("01011").unwrap();
        assert_eq!(mask.count_ones(), 3);
        assert_eq!(mask.to_bitstring(), "01011");
        assert!(EnsembleMask::from_bitstring("01x1").is_err());
        assert!(EnsembleMask::from_bitstring("").is_err());
    }

    #[test]
    fn mask_ordering_is_bitstring_lexicographic() {
        let a = EnsembleMask::from_bitstring("001").unwrap();
        let b = EnsembleMask::from_bitstring("100").unwrap();
        assert!(a < b);
    }
}
