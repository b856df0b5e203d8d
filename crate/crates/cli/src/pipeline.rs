//! Wiring between the CLI flags and the library: resolve the data source
//! into prediction matrices and run one prune under any variant.

use std::path::Path;

use anyhow::{bail, Context, Result};
use epp_core::solver::ArchiveEntryRecord;
use epp_core::*;

use crate::args::{DataArgs, PoolArgs, SelectKind, SolverArgs, Variant};

/// Everything a prune or benchmark needs from the data stage.
pub struct Prepared {
    pub pm_validation: PredictionMatrix,
    pub pm_test: Option<PredictionMatrix>,
    pub pool: Option<ClassifierPool>,
}

/// Label column resolution: explicit flag wins, otherwise the last column.
fn resolve_label_column(path: &Path, label_col: &Option<String>) -> Result<LabelColumn> {
    if let Some(spec) = label_col {
        return Ok(spec.parse().expect("LabelColumn parsing is infallible"));
    }
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut records = rdr.records();
    let first = records
        .next()
        .transpose()?
        .context("cannot infer the label column of an empty file")?;
    Ok(LabelColumn::Index(first.len() - 1))
}

/// Loads or synthesizes the dataset, splits it, trains the bagged pool,
/// and precomputes validation and test matrices. The load report goes to
/// standard error.
pub fn prepare_from_data(data: &DataArgs, pool_args: &PoolArgs) -> Result<Prepared> {
    let dataset = match (&data.data, data.synthetic) {
        (Some(path), None) => {
            let label = resolve_label_column(path, &data.label_col)?;
            let (dataset, report) = load_csv(path, &label, data.has_header)
                .with_context(|| format!("loading {}", path.display()))?;
            eprintln!(
                "loaded {}: kept {} rows, dropped {}",
                path.display(),
                report.rows_kept,
                report.rows_dropped
            );
            for w in &report.warnings {
                eprintln!("  warning: {w}");
            }
            let classes: Vec<String> = report
                .class_names
                .iter()
                .enumerate()
                .map(|(i, name)| format!("{name:?}->{i}"))
                .collect();
            eprintln!("classes: {}", classes.join(", "));
            dataset
        }
        (None, Some((rows, attrs, classes))) => synthesize(rows, attrs, classes, data.split_seed)?,
        (None, None) => bail!("provide a data source: --data, --synthetic, or --matrix"),
        (Some(_), Some(_)) => bail!("--data and --synthetic are mutually exclusive"),
    };

    let parts = if data.stratify {
        split_stratified(&dataset, data.split, data.split_seed)?
    } else {
        split(&dataset, data.split, data.split_seed)?
    };
    let params = TreeParams { max_depth: pool_args.max_depth, min_leaf: pool_args.min_leaf };
    let pool = fit_bagging(&parts.train, pool_args.m, &params, pool_args.pool_seed)?;
    let pm_validation = predict_matrix(&pool, &parts.validation)?;
    let pm_test = predict_matrix(&pool, &parts.test)?;
    Ok(Prepared { pm_validation, pm_test: Some(pm_test), pool: Some(pool) })
}

/// Like [`prepare_from_data`], but an explicit prediction-matrix file
/// bypasses training entirely.
pub fn prepare(
    data: &DataArgs,
    matrix: &Option<std::path::PathBuf>,
    pool_args: &PoolArgs,
) -> Result<Prepared> {
    match matrix {
        Some(path) => {
            if data.data.is_some() || data.synthetic.is_some() {
                bail!("--matrix replaces --data/--synthetic; give only one source");
            }
            let pm = learners::read_matrix_csv_path(path)
                .with_context(|| format!("loading {}", path.display()))?;
            Ok(Prepared { pm_validation: pm, pm_test: None, pool: None })
        }
        None => prepare_from_data(data, pool_args),
    }
}

pub fn framework_config(solver: &SolverArgs) -> FrameworkConfig {
    FrameworkConfig {
        iterations: solver.iterations,
        solver_seed: solver.solver_seed,
        mutation_rate: None,
        c_min: solver.cmin,
        c_max: solver.cmax,
    }
}

/// Output of one prune run, ready for export.
pub struct PruneOutcome {
    pub assignment: Assignment,
    /// Archive rows: the solver's archive for bf/omf, the per-participant
    /// winners for peps.
    pub archive_records: Vec<ArchiveEntryRecord>,
    /// Reported archive size l (for peps: number of winner entries, = n).
    pub archive_size: usize,
}

/// Runs one variant end to end: solve, then select. This is the unit the
/// benchmark times.
pub fn prune_once(
    pm: &PredictionMatrix,
    profile: &TradeoffProfile,
    cfg: &FrameworkConfig,
    variant: Variant,
    select: SelectKind,
) -> Result<PruneOutcome> {
    match variant {
        Variant::Bf | Variant::Omf => {
            let kind = match variant {
                Variant::Bf => FrameworkKind::Basic,
                _ => FrameworkKind::ObjectiveMixture,
            };
            let (archive, assignment) = match select {
                SelectKind::Sorted => {
                    let run = run_framework(pm, profile, cfg, kind)?;
                    (run.archive, run.assignment)
                }
                SelectKind::Exact => {
                    let mode = cfg.mode(kind, profile)?;
                    let archive = solve(pm, &cfg.solver_config(cfg.solver_seed, mode))?;
                    let assignment = select_exact(&archive, profile)?;
                    (archive, assignment)
                }
            };
            Ok(PruneOutcome {
                archive_records: archive.records(),
                archive_size: archive.len(),
                assignment,
            })
        }
        Variant::Peps => {
            let assignment = run_peps_baseline(pm, profile, cfg)?;
            let archive_records = assignment
                .selections
                .iter()
                .map(|s| ArchiveEntryRecord {
                    mask: s.mask.to_bitstring(),
                    error: s.error,
                    size: s.mask.count_ones(),
                    o1: s.loss,
                    o2: s.loss,
                })
                .collect::<Vec<_>>();
            let archive_size = archive_records.len();
            Ok(PruneOutcome { assignment, archive_records, archive_size })
        }
    }
}

/// Mean combined loss of the assignment's masks re-evaluated on another
/// matrix (the test set), keeping each participant's level.
pub fn mean_loss_on(assignment: &Assignment, pm: &PredictionMatrix) -> Result<f64> {
    let mut total = 0.0;
    for s in &assignment.selections {
        total += error_rate(&s.mask, pm)? + s.alpha * s.mask.count_ones() as f64;
    }
    Ok(total / assignment.selections.len() as f64)
}
