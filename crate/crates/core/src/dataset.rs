//! Labeled tabular data: CSV ingestion, seeded train/validation/test splits,
//! and a synthetic generator for desk-scale experiments.

use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Spread of the synthetic class-conditional means relative to unit
/// within-class noise. Small enough that classes overlap and ensembling
/// pays off, large enough that single trees beat chance by a wide margin.
const CLASS_MEAN_SPREAD: f64 = 0.6;

/// A labeled dataset with real-valued attributes and dense class indices.
#[derive(Debug, Clone)]
pub struct Dataset {
    features: Vec<f64>,
    n_attrs: usize,
    labels: Vec<usize>,
    n_classes: usize,
}

impl Dataset {
    /// Builds a dataset from a row-major feature matrix.
    ///
    /// `n_classes` is the size of the label space, not the number of
    /// distinct labels present; subsets of a dataset keep the full space.
    pub fn new(
        features: Vec<f64>,
        n_attrs: usize,
        labels: Vec<usize>,
        n_classes: usize,
    ) -> Result<Self> {
        if n_attrs == 0 {
            return Err(Error::InvalidParameter("n_attrs must be >= 1".into()));
        }
        if n_classes < 2 {
            return Err(Error::TooFewClasses { found: n_classes });
        }
        if features.len() != labels.len() * n_attrs {
            return Err(Error::InvalidParameter(format!(
                "feature matrix has {} values, expected {} rows x {} attrs",
                features.len(),
                labels.len(),
                n_attrs
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::InvalidParameter(format!(
                "label {bad} out of range for {n_classes} classes"
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "feature matrix contains non-finite values".into(),
            ));
        }
        Ok(Self { features, n_attrs, labels, n_classes })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_attrs(&self) -> usize {
        self.n_attrs
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_attrs..(i + 1) * self.n_attrs]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    /// New dataset holding the given rows, in order. Indices may repeat,
    /// which is how bootstrap resamples are drawn.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.n_attrs);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Dataset { features, n_attrs: self.n_attrs, labels, n_classes: self.n_classes }
    }
}

/// Disjoint train/validation/test partition of a dataset.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
    pub seed: u64,
}

/// What happened while ingesting a CSV file.
#[derive(Debug, Clone)]
pub struct LoadReport {
    pub rows_kept: usize,
    pub rows_dropped: usize,
    /// Original label strings in first-appearance order; index = class index.
    pub class_names: Vec<String>,
    /// Row/column locations of dropped rows, capped at [`LoadReport::MAX_WARNINGS`].
    pub warnings: Vec<String>,
}

impl LoadReport {
    pub const MAX_WARNINGS: usize = 20;
}

/// Which column of the CSV holds the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// Digits parse as a zero-based index, anything else as a column name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

/// Loads a comma-separated file into a [`Dataset`].
///
/// Labels are mapped to dense indices in first-appearance order. Rows with
/// unparsable or non-finite feature cells are dropped and counted in the
/// report rather than failing the load.
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: &LabelColumn,
    has_header: bool,
) -> Result<(Dataset, LoadReport)> {
    let file = std::fs::File::open(path.as_ref())?;
    load_csv_from(file, label_column, has_header)
}

/// Same as [`load_csv`] but reading from any source; the CLI and tests use
/// this with in-memory buffers.
pub fn load_csv_from(
    reader: impl Read,
    label_column: &LabelColumn,
    has_header: bool,
) -> Result<(Dataset, LoadReport)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .from_reader(reader);

    let label_idx;
    let mut width = None;
    if has_header {
        let headers = rdr.headers()?.clone();
        width = Some(headers.len());
        label_idx = match label_column {
            LabelColumn::Name(name) => headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::LabelColumnNotFound(name.clone()))?,
            LabelColumn::Index(i) => *i,
        };
    } else {
        label_idx = match label_column {
            LabelColumn::Name(_) => return Err(Error::LabelNameWithoutHeader),
            LabelColumn::Index(i) => *i,
        };
    }

    let mut features = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    let mut dropped = 0usize;
    let mut warnings = Vec::new();
    let warn = |rows_dropped: &mut usize, warnings: &mut Vec<String>, msg: String| {
        *rows_dropped += 1;
        if warnings.len() < LoadReport::MAX_WARNINGS {
            warnings.push(msg);
        }
    };

    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            warn(&mut dropped, &mut warnings, format!("row {row}: expected {w} columns, found {}", record.len()));
            continue;
        }
        if label_idx >= w {
            return Err(Error::LabelColumnNotFound(format!("index {label_idx}")));
        }
        let mut row_feats = Vec::with_capacity(w - 1);
        let mut bad = None;
        for (col, cell) in record.iter().enumerate() {
            if col == label_idx {
                continue;
            }
            match cell.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => row_feats.push(v),
                _ => {
                    bad = Some(format!("row {row}, column {col}: cannot parse {cell:?} as a finite number"));
                    break;
                }
            }
        }
        if let Some(msg) = bad {
            warn(&mut dropped, &mut warnings, msg);
            continue;
        }
        raw_labels.push(record[label_idx].trim().to_string());
        features.extend_from_slice(&row_feats);
    }

    if raw_labels.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n_attrs = features.len() / raw_labels.len();
    if n_attrs == 0 {
        return Err(Error::InvalidParameter("rows have no feature columns".into()));
    }

    // First-appearance dense label encoding.
    let mut class_names: Vec<String> = Vec::new();
    let mut labels = Vec::with_capacity(raw_labels.len());
    for raw in &raw_labels {
        let idx = match class_names.iter().position(|c| c == raw) {
            Some(i) => i,
            None => {
                class_names.push(raw.clone());
                class_names.len() - 1
            }
        };
        labels.push(idx);
    }
    if class_names.len() < 2 {
        return Err(Error::TooFewClasses { found: class_names.len() });
    }

    let rows_kept = labels.len();
    let dataset = Dataset::new(features, n_attrs, labels, class_names.len())?;
    Ok((dataset, LoadReport { rows_kept, rows_dropped: dropped, class_names, warnings }))
}

fn part_sizes(n: usize, ratios: (f64, f64, f64)) -> Result<(usize, usize, usize)> {
    let (r0, r1, r2) = ratios;
    let sum = r0 + r1 + r2;
    if !(sum - 1.0).abs().is_finite() || (sum - 1.0).abs() > 1e-9 || r0 < 0.0 || r1 < 0.0 || r2 < 0.0 {
        return Err(Error::BadSplitRatios(ratios));
    }
    let n0 = (n as f64 * r0).round() as usize;
    let n1 = ((n as f64 * r1).round() as usize).min(n.saturating_sub(n0));
    let n2 = n - n0 - n1;
    if n0 == 0 {
        return Err(Error::EmptySplitPart("train"));
    }
    if n1 == 0 {
        return Err(Error::EmptySplitPart("validation"));
    }
    if n2 == 0 {
        return Err(Error::EmptySplitPart("test"));
    }
    Ok((n0, n1, n2))
}

/// Shuffles row indices with a seeded PRNG and cuts by position. Within each
/// part, rows keep the shuffled order. Deterministic for a fixed seed.
pub fn split(data: &Dataset, ratios: (f64, f64, f64), seed: u64) -> Result<Split> {
    let n = data.n_rows();
    let (n0, n1, _) = part_sizes(n, ratios)?;
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    Ok(Split {
        train: data.subset(&indices[..n0]),
        validation: data.subset(&indices[n0..n0 + n1]),
        test: data.subset(&indices[n0 + n1..]),
        seed,
    })
}

/// Stratified variant of [`split`]: shuffles within each class and
/// apportions the class across parts with carried rounding remainders, so
/// part totals still match the ratios within one row.
pub fn split_stratified(data: &Dataset, ratios: (f64, f64, f64), seed: u64) -> Result<Split> {
    let n = data.n_rows();
    part_sizes(n, ratios)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); data.n_classes()];
    for i in 0..n {
        by_class[data.label(i)].push(i);
    }

    let mut parts: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    // Running fractional remainders keep global part sizes within +-1 row.
    let mut carry = [0.0f64; 3];
    let fractions = [ratios.0, ratios.1, ratios.2];
    for class_rows in by_class.iter_mut() {
        class_rows.shuffle(&mut rng);
        let total = class_rows.len();
        let mut taken = 0usize;
        for p in 0..3 {
            let want = if p == 2 {
                total - taken
            } else {
                let ideal = total as f64 * fractions[p] + carry[p];
                let take = (ideal.round() as usize).min(total - taken);
                carry[p] = ideal - take as f64;
                take
            };
            parts[p].extend_from_slice(&class_rows[taken..taken + want]);
            taken += want;
        }
    }
    for (p, name) in [(0, "train"), (1, "validation"), (2, "test")] {
        if parts[p].is_empty() {
            return Err(Error::EmptySplitPart(name));
        }
    }
    Ok(Split {
        train: data.subset(&parts[0]),
        validation: data.subset(&parts[1]),
        test: data.subset(&parts[2]),
        seed,
    })
}

/// Generates Gaussian class-conditional clusters: per-class mean vectors are
/// drawn from the seed, rows get unit-variance noise around their class
/// mean. The first `n_classes` rows take labels 0..K-1 so every class
/// appears at least once. Byte-identical output for identical arguments.
pub fn synthesize(n_rows: usize, n_attrs: usize, n_classes: usize, seed: u64) -> Result<Dataset> {
    if n_classes < 2 || n_rows < n_classes {
        return Err(Error::InvalidParameter(format!(
            "need n_rows >= n_classes >= 2 (got {n_rows}, {n_classes})"
        )));
    }
    if n_attrs == 0 {
        return Err(Error::InvalidParameter("n_attrs must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means: Vec<f64> = (0..n_classes * n_attrs)
        .map(|_| CLASS_MEAN_SPREAD * rng.sample::<f64, _>(StandardNormal))
        .collect();

    let mut labels = Vec::with_capacity(n_rows);
    let mut features = Vec::with_capacity(n_rows * n_attrs);
    for i in 0..n_rows {
        let label = if i < n_classes { i } else { rng.random_range(0..n_classes) };
        labels.push(label);
        let mean = &means[label * n_attrs..(label + 1) * n_attrs];
        for &mu in mean {
            features.push(mu + rng.sample::<f64, _>(StandardNormal));
        }
    }
    Dataset::new(features, n_attrs, labels, n_classes)
}
