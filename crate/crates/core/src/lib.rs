//! Personalized ensemble pruning.
//!
//! A pool of base classifiers rarely fits every consumer: some want the
//! most accurate ensemble they can get, others want the cheapest one that
//! is still useful. This crate prunes one bagged pool into a personalized
//! sub-ensemble per participant, each minimizing the combined loss
//! E(S) + alpha * |S| at that participant's own trade-off level alpha.
//!
//! The pipeline: [`dataset`] ingests or synthesizes labeled tabular data,
//! [`learners`] trains a bagged CART pool and precomputes its prediction
//! matrix, [`solver`] approximates the Pareto front over (error, cost)
//! with an evolutionary archive, and [`personalize`] maps every
//! trade-off level to its archive entry in one sorted sweep. When the
//! levels are known up front, the objective-mixture mode in [`objectives`]
//! folds their range into both objectives so the search concentrates on
//! ensembles someone will actually select.

pub mod dataset;
pub mod error;
pub mod learners;
pub mod objectives;
pub mod personalize;
pub mod solver;
pub mod tree;

pub use dataset::{load_csv, split, split_stratified, synthesize, Dataset, LabelColumn, LoadReport, Split};
pub use error::{Error, Result};
pub use learners::{fit_bagging, predict_matrix, ClassifierPool, PredictionMatrix};
pub use objectives::{
    combined_loss, ensemble_cost, error_rate, evaluate, evaluate_with_costs, EnsembleMask,
    ObjectiveMode, ObjectiveVector,
};
pub use personalize::{
    run_framework, run_peps_baseline, select_exact, select_sorted, Assignment, FrameworkConfig,
    FrameworkKind, FrameworkRun, Selection, TradeoffProfile,
};
pub use solver::{solve, true_pareto_front, ArchiveEntry, ParetoArchive, Solver, SolverConfig};
pub use tree::{fit_tree, DecisionTree, TreeParams};
