//! CART-style decision trees: greedy top-down induction by Gini impurity
//! with fully deterministic tie-breaking, so identical inputs always yield
//! structurally identical trees.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Flat tree node; children are indices into [`DecisionTree::nodes`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split { attr: usize, threshold: f64, left: usize, right: usize },
    Leaf { class: usize },
}

/// Induction hyperparameters. The defaults suit bagged pools on tabular
/// data with a few dozen attributes.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self { max_depth: 8, min_leaf: 2 }
    }
}

/// A trained axis-aligned binary classification tree rooted at node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    max_depth: usize,
    min_leaf: usize,
    n_attrs: usize,
    n_classes: usize,
}

impl DecisionTree {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_attrs(&self) -> usize {
        self.n_attrs
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Predicted class index for one example. Rows shorter than the
    /// training attribute count panic; [`crate::learners::predict_matrix`]
    /// checks shapes up front.
    pub fn predict(&self, row: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { class } => return class,
                Node::Split { attr, threshold, left, right } => {
                    at = if row[attr] <= threshold { left } else { right };
                }
            }
        }
    }

    /// Fraction of rows whose prediction differs from the label.
    pub fn error_on(&self, data: &Dataset) -> f64 {
        let wrong = (0..data.n_rows())
            .filter(|&i| self.predict(data.row(i)) != data.label(i))
            .count();
        wrong as f64 / data.n_rows() as f64
    }

    /// Depth of the deepest node (root = 0).
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize, d: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => d,
                Node::Split { left, right, .. } => {
                    walk(nodes, left, d + 1).max(walk(nodes, right, d + 1))
                }
            }
        }
        walk(&self.nodes, 0, 0)
    }
}

/// Trains a single tree by greedy Gini induction.
///
/// Splits are (attribute, threshold) pairs with thresholds at midpoints of
/// sorted distinct attribute values; rows with value <= threshold go left.
/// A node becomes a leaf when it is pure, at `max_depth`, or when no
/// candidate split leaves `min_leaf` rows on each side. Impure nodes split
/// on the best valid candidate even at zero Gini gain, which is what lets
/// XOR-style patterns separate at depth 2. Ties on impurity resolve to the
/// lowest attribute index, then the smallest threshold; leaf majorities tie
/// toward the lowest class index.
pub fn fit_tree(train: &Dataset, params: &TreeParams) -> Result<DecisionTree> {
    if train.n_rows() == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    if params.max_depth < 1 || params.min_leaf < 1 {
        return Err(Error::InvalidParameter(
            "max_depth and min_leaf must be >= 1".into(),
        ));
    }
    let mut builder = Builder {
        data: train,
        params: *params,
        nodes: Vec::new(),
        // scratch buffers reused across nodes
        sorted: Vec::new(),
    };
    let all: Vec<usize> = (0..train.n_rows()).collect();
    builder.build(all, 0);
    Ok(DecisionTree {
        nodes: builder.nodes,
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        n_attrs: train.n_attrs(),
        n_classes: train.n_classes(),
    })
}

struct Builder<'a> {
    data: &'a Dataset,
    params: TreeParams,
    nodes: Vec<Node>,
    sorted: Vec<(f64, usize)>,
}

struct BestSplit {
    attr: usize,
    threshold: f64,
    weighted_gini: f64,
}

impl Builder<'_> {
    fn build(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let counts = self.class_counts(&rows);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= self.params.max_depth {
            return self.push_leaf(&counts);
        }
        match self.best_split(&rows) {
            None => self.push_leaf(&counts),
            Some(best) => {
                let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                    .into_iter()
                    .partition(|&i| self.data.row(i)[best.attr] <= best.threshold);
                let id = self.nodes.len();
                self.nodes.push(Node::Leaf { class: 0 }); // placeholder
                let left = self.build(left_rows, depth + 1);
                let right = self.build(right_rows, depth + 1);
                self.nodes[id] = Node::Split { attr: best.attr, threshold: best.threshold, left, right };
                id
            }
        }
    }

    fn class_counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0usize; self.data.n_classes()];
        for &i in rows {
            counts[self.data.label(i)] += 1;
        }
        counts
    }

    fn push_leaf(&mut self, counts: &[usize]) -> usize {
        // majority class, ties to the lowest class index
        let class = counts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(k, _)| k)
            .unwrap();
        self.nodes.push(Node::Leaf { class });
        self.nodes.len() - 1
    }

    fn best_split(&mut self, rows: &[usize]) -> Option<BestSplit> {
        let n = rows.len();
        let min_leaf = self.params.min_leaf;
        if n < 2 * min_leaf {
            return None;
        }
        let k = self.data.n_classes();
        let total = self.class_counts(rows);
        let total_sq: u64 = total.iter().map(|&c| (c as u64) * (c as u64)).sum();

        let data = self.data;
        let mut best: Option<BestSplit> = None;
        let mut left = vec![0usize; k];
        for attr in 0..data.n_attrs() {
            self.sorted.clear();
            self.sorted.extend(rows.iter().map(|&i| (data.row(i)[attr], i)));
            self.sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

            left.fill(0);
            // running sums of squared counts let Gini update in O(1)
            let mut left_sq = 0u64;
            let mut right_sq = total_sq;
            for pos in 0..n - 1 {
                let label = data.label(self.sorted[pos].1);
                let l = left[label] as u64;
                let r = (total[label] - left[label]) as u64;
                left_sq += 2 * l + 1;
                right_sq -= 2 * r - 1;
                left[label] += 1;

                let v = self.sorted[pos].0;
                let next = self.sorted[pos + 1].0;
                if next <= v {
                    continue; // not a boundary between distinct values
                }
                let ln = pos + 1;
                let rn = n - ln;
                if ln < min_leaf || rn < min_leaf {
                    continue;
                }
                // weighted Gini = sum over sides of side_n * (1 - sum c^2 / side_n^2)
                let weighted = (ln as f64 - left_sq as f64 / ln as f64)
                    + (rn as f64 - right_sq as f64 / rn as f64);
                if best.as_ref().is_none_or(|b| weighted < b.weighted_gini) {
                    best = Some(BestSplit { attr, threshold: (v + next) / 2.0, weighted_gini: weighted });
                }
            }
        }
        best
    }
}
