//! The classifier pool: bagged CART trees and the precomputed prediction
//! matrix that turns every later error evaluation into a vote recount.

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::tree::{fit_tree, DecisionTree, TreeParams};

/// A pool of trees trained on bootstrap resamples of one training set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifierPool {
    trees: Vec<DecisionTree>,
    bootstrap_seed: u64,
    n_attrs: usize,
    n_classes: usize,
}

impl ClassifierPool {
    pub fn m(&self) -> usize {
        self.trees.len()
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn bootstrap_seed(&self) -> u64 {
        self.bootstrap_seed
    }

    pub fn n_attrs(&self) -> usize {
        self.n_attrs
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }
}

/// Trains `m` trees by Bagging: each tree fits a with-replacement bootstrap
/// sample of `train` (same size as `train`) drawn from one seeded stream.
///
/// Bootstrap index sets are drawn sequentially up front; tree fitting on
/// those fixed samples is independent per tree and could run concurrently,
/// with results ordered by tree index either way.
pub fn fit_bagging(
    train: &Dataset,
    m: usize,
    params: &TreeParams,
    seed: u64,
) -> Result<ClassifierPool> {
    if m == 0 {
        return Err(Error::InvalidParameter("pool size m must be >= 1".into()));
    }
    if train.n_rows() == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    let n = train.n_rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Vec<usize>> = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(0..n)).collect())
        .collect();

    let trees = samples
        .iter()
        .map(|idx| fit_tree(&train.subset(idx), params))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassifierPool {
        trees,
        bootstrap_seed: seed,
        n_attrs: train.n_attrs(),
        n_classes: train.n_classes(),
    })
}

/// Precomputed base-classifier predictions on a labeled evaluation set.
///
/// `m` rows of `v` class indices plus the `v` true labels. All ensemble
/// error evaluations run against this matrix instead of re-executing trees.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionMatrix {
    preds: Vec<usize>,
    labels: Vec<usize>,
    n_classifiers: usize,
    n_classes: usize,
}

impl PredictionMatrix {
    pub fn from_rows(rows: Vec<Vec<usize>>, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyPool);
        }
        if labels.is_empty() {
            return Err(Error::InvalidParameter("prediction matrix needs at least one example".into()));
        }
        if n_classes < 2 {
            return Err(Error::TooFewClasses { found: n_classes });
        }
        let v = labels.len();
        let mut preds = Vec::with_capacity(rows.len() * v);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != v {
                return Err(Error::InvalidParameter(format!(
                    "classifier row {i} has {} predictions, expected {v}",
                    row.len()
                )));
            }
            preds.extend_from_slice(row);
        }
        if preds.iter().chain(labels.iter()).any(|&c| c >= n_classes) {
            return Err(Error::InvalidParameter(format!(
                "class index out of range for {n_classes} classes"
            )));
        }
        Ok(Self { preds, labels, n_classifiers: rows.len(), n_classes })
    }

    /// Number of classifiers m.
    pub fn n_classifiers(&self) -> usize {
        self.n_classifiers
    }

    /// Number of evaluation examples v.
    pub fn n_examples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Classifier `i`'s prediction on example `j`.
    #[inline]
    pub fn pred(&self, i: usize, j: usize) -> usize {
        self.preds[i * self.labels.len() + j]
    }

    /// Classifier `i`'s predictions on all examples.
    pub fn row(&self, i: usize) -> &[usize] {
        let v = self.labels.len();
        &self.preds[i * v..(i + 1) * v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

/// Runs every tree in the pool over `data`.
pub fn predict_matrix(pool: &ClassifierPool, data: &Dataset) -> Result<PredictionMatrix> {
    if data.n_attrs() != pool.n_attrs() {
        return Err(Error::AttributeMismatch { expected: pool.n_attrs(), got: data.n_attrs() });
    }
    if data.n_classes() != pool.n_classes() {
        return Err(Error::InvalidParameter(format!(
            "pool was trained with {} classes, data has {}",
            pool.n_classes(),
            data.n_classes()
        )));
    }
    if data.n_rows() == 0 {
        return Err(Error::InvalidParameter("cannot predict on an empty dataset".into()));
    }
    let rows = pool
        .trees()
        .iter()
        .map(|tree| (0..data.n_rows()).map(|j| tree.predict(data.row(j))).collect())
        .collect();
    PredictionMatrix::from_rows(rows, data.labels().to_vec(), data.n_classes())
}

/// Writes the interchange format: first record holds the true labels,
/// record i+1 holds classifier i's predictions, all as integer class
/// indices.
pub fn write_matrix_csv(pm: &PredictionMatrix, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let as_strings = |vals: &[usize]| vals.iter().map(|v| v.to_string()).collect::<Vec<_>>();
    w.write_record(as_strings(pm.labels()))?;
    for i in 0..pm.n_classifiers() {
        w.write_record(as_strings(pm.row(i)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_matrix_csv_path(pm: &PredictionMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_matrix_csv(pm, std::fs::File::create(path)?)
}

/// Reads the interchange format back. The class count is inferred as one
/// past the largest index present.
pub fn read_matrix_csv(reader: impl Read) -> Result<PredictionMatrix> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    let mut records = rdr.records();
    let parse_row = |record: &csv::StringRecord, what: &str| -> Result<Vec<usize>> {
        record
            .iter()
            .map(|cell| {
                cell.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::MalformedMatrix(format!("{what}: {cell:?} is not a class index")))
            })
            .collect()
    };
    let labels = match records.next() {
        Some(first) => parse_row(&first?, "label row")?,
        None => return Err(Error::MalformedMatrix("file is empty".into())),
    };
    let mut rows = Vec::new();
    for (i, record) in records.enumerate() {
        rows.push(parse_row(&record?, &format!("classifier row {i}"))?);
    }
    if rows.is_empty() {
        return Err(Error::MalformedMatrix("no classifier rows after the label row".into()));
    }
    let max = rows.iter().flatten().chain(labels.iter()).copied().max().unwrap_or(0);
    PredictionMatrix::from_rows(rows, labels, (max + 1).max(2))
}

pub fn read_matrix_csv_path(path: impl AsRef<Path>) -> Result<PredictionMatrix> {
    read_matrix_csv(std::fs::File::open(path)?)
}
