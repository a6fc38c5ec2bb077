//! Simplified second-order gradient boosting: exact greedy splits, softmax
//! objective, one tree per class per round.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

const PRIOR_FLOOR: f64 = 1e-6;
const HESSIAN_FLOOR: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbdtConfig {
    pub rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub lambda: f64,
    pub min_child_weight: f64,
}

impl Default for GbdtConfig {
    fn default() -> Self {
        Self {
            rounds: 100,
            max_depth: 4,
            learning_rate: 0.1,
            lambda: 1.0,
            min_child_weight: 1.0,
        }
    }
}

impl GbdtConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidConfig("gbdt rounds must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "gbdt learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidConfig(format!("gbdt lambda must be ≥ 0, got {}", self.lambda)));
        }
        if !(self.min_child_weight.is_finite() && self.min_child_weight >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "gbdt min_child_weight must be ≥ 0, got {}",
                self.min_child_weight
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeNode {
    /// Rows with `x[feature] < threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        weight: f64,
    },
}

impl TreeNode {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { weight } => return *weight,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[*feature] < *threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub n_classes: usize,
    pub learning_rate: f64,
    /// Log of the (floored) training prior of each class.
    pub base_score: Vec<f64>,
    /// `trees[round][class]`.
    pub trees: Vec<Vec<TreeNode>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

fn leaf_score(g: f64, h: f64, lambda: f64) -> f64 {
    g * g / (h + lambda)
}

/// Highest-gain split of `rows`, or `None` when no split has positive gain
/// with both children meeting `min_child_weight`. Thresholds sit halfway
/// between adjacent distinct values; gain ties keep the lower feature, then
/// the lower threshold.
pub fn best_split(
    x: &Matrix,
    grad: &[f64],
    hess: &[f64],
    rows: &[usize],
    lambda: f64,
    min_child_weight: f64,
) -> Option<SplitCandidate> {
    let orders: Vec<Vec<usize>> = (0..x.cols())
        .map(|f| {
            let mut o = rows.to_vec();
            o.sort_by(|&a, &b| x[(a, f)].total_cmp(&x[(b, f)]).then(a.cmp(&b)));
            o
        })
        .collect();
    best_split_sorted(x, grad, hess, &orders, lambda, min_child_weight)
}

/// `orders[f]` lists the node's rows sorted by feature `f`.
fn best_split_sorted(
    x: &Matrix,
    grad: &[f64],
    hess: &[f64],
    orders: &[Vec<usize>],
    lambda: f64,
    min_child_weight: f64,
) -> Option<SplitCandidate> {
    let rows = orders.first()?;
    let g_total: f64 = rows.iter().map(|&r| grad[r]).sum();
    let h_total: f64 = rows.iter().map(|&r| hess[r]).sum();
    let parent = leaf_score(g_total, h_total, lambda);
    let mut best: Option<SplitCandidate> = None;

    for (f, order) in orders.iter().enumerate() {
        let (mut gl, mut hl) = (0.0, 0.0);
        for w in 0..order.len().saturating_sub(1) {
            let r = order[w];
            gl += grad[r];
            hl += hess[r];
            let (v, next) = (x[(r, f)], x[(order[w + 1], f)]);
            if v == next {
                continue;
            }
            let (gr, hr) = (g_total - gl, h_total - hl);
            if hl < min_child_weight || hr < min_child_weight {
                continue;
            }
            let gain = 0.5 * (leaf_score(gl, hl, lambda) + leaf_score(gr, hr, lambda) - parent);
            if gain > 0.0 && best.is_none_or(|b| gain > b.gain) {
                best = Some(SplitCandidate {
                    feature: f,
                    threshold: v + (next - v) / 2.0,
                    gain,
                });
            }
        }
    }
    best
}

struct TreeBuilder<'a> {
    x: &'a Matrix,
    grad: &'a [f64],
    hess: &'a [f64],
    config: &'a GbdtConfig,
}

impl TreeBuilder<'_> {
    fn build(&self, orders: Vec<Vec<usize>>, depth: usize) -> TreeNode {
        let split = if depth < self.config.max_depth {
            best_split_sorted(
                self.x,
                self.grad,
                self.hess,
                &orders,
                self.config.lambda,
                self.config.min_child_weight,
            )
        } else {
            None
        };
        let Some(split) = split else {
            let rows = &orders[0];
            let g: f64 = rows.iter().map(|&r| self.grad[r]).sum();
            let h: f64 = rows.iter().map(|&r| self.hess[r]).sum();
            return TreeNode::Leaf {
                weight: -g / (h + self.config.lambda),
            };
        };
        // Stable partition keeps every per-feature order sorted.
        let goes_left = |r: usize| self.x[(r, split.feature)] < split.threshold;
        let (left, right): (Vec<Vec<usize>>, Vec<Vec<usize>>) = orders
            .into_iter()
            .map(|o| o.into_iter().partition(|&r| goes_left(r)))
            .unzip();
        TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: Box::new(self.build(left, depth + 1)),
            right: Box::new(self.build(right, depth + 1)),
        }
    }
}

fn softmax_in_place(scores: &mut [f64]) {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for s in scores.iter_mut() {
        *s = (*s - max).exp();
        sum += *s;
    }
    scores.iter_mut().for_each(|s| *s /= sum);
}

/// Mean multiclass log-loss of raw scores (n×C) against labels.
pub fn softmax_log_loss(scores: &Matrix, labels: &[usize]) -> f64 {
    let mut total = 0.0;
    for (i, &y) in labels.iter().enumerate() {
        let row = scores.row(i);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = row.iter().map(|&s| (s - max).exp()).sum::<f64>().ln() + max;
        total += lse - row[y];
    }
    total / labels.len() as f64
}

impl GbdtModel {
    /// Trains on all rows of `x`. A training set with a single class yields
    /// a constant model with no trees.
    pub fn train(x: &Matrix, labels: &[usize], n_classes: usize, config: &GbdtConfig) -> Result<Self> {
        config.validate()?;
        let n = x.rows();
        if n < 2 {
            return Err(Error::TooFewRows { needed: 2, got: n });
        }
        if labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: labels.len(),
            });
        }
        if n_classes < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 classes, got {n_classes}")));
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::LabelOutOfRange { label, n_classes });
        }
        if !x.is_finite() {
            return Err(Error::NonFinite("GBDT training features"));
        }

        let mut counts = vec![0usize; n_classes];
        labels.iter().for_each(|&l| counts[l] += 1);
        let base_score: Vec<f64> = counts
            .iter()
            .map(|&c| (c as f64 / n as f64).clamp(PRIOR_FLOOR, 1.0 - PRIOR_FLOOR).ln())
            .collect();
        let mut model = GbdtModel {
            n_classes,
            learning_rate: config.learning_rate,
            base_score,
            trees: Vec::new(),
        };
        if counts.iter().filter(|&&c| c > 0).count() < 2 {
            return Ok(model);
        }

        let root_orders: Vec<Vec<usize>> = (0..x.cols())
            .map(|f| {
                let mut o: Vec<usize> = (0..n).collect();
                o.sort_by(|&a, &b| x[(a, f)].total_cmp(&x[(b, f)]).then(a.cmp(&b)));
                o
            })
            .collect();
        let mut scores = Matrix::zeros(n, n_classes);
        for i in 0..n {
            scores.row_mut(i).copy_from_slice(&model.base_score);
        }
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n];
        for _ in 0..config.rounds {
            let mut probs = scores.clone();
            for i in 0..n {
                softmax_in_place(probs.row_mut(i));
            }
            let mut round = Vec::with_capacity(n_classes);
            for c in 0..n_classes {
                for i in 0..n {
                    let p = probs[(i, c)];
                    grad[i] = p - if labels[i] == c { 1.0 } else { 0.0 };
                    hess[i] = (p * (1.0 - p)).max(HESSIAN_FLOOR);
                }
                let builder = TreeBuilder {
                    x,
                    grad: &grad,
                    hess: &hess,
                    config,
                };
                let tree = builder.build(root_orders.clone(), 0);
                for i in 0..n {
                    scores[(i, c)] += config.learning_rate * tree.evaluate(x.row(i));
                }
                round.push(tree);
            }
            model.trees.push(round);
        }
        Ok(model)
    }

    /// Base score plus the η-scaled leaf weights of every tree.
    pub fn decision_function(&self, x: &[f64]) -> Vec<f64> {
        let mut scores = self.base_score.clone();
        for round in &self.trees {
            for (c, tree) in round.iter().enumerate() {
                scores[c] += self.learning_rate * tree.evaluate(x);
            }
        }
        scores
    }

    pub fn predict_one(&self, x: &[f64]) -> usize {
        let s = self.decision_function(x);
        let mut best = 0;
        for (c, &v) in s.iter().enumerate() {
            if v > s[best] {
                best = c;
            }
        }
        best
    }

    pub fn predict(&self, x: &Matrix) -> Vec<usize> {
        (0..x.rows()).map(|i| self.predict_one(x.row(i))).collect()
    }

    pub fn scores(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(x.rows(), self.n_classes);
        for i in 0..x.rows() {
            out.row_mut(i).copy_from_slice(&self.decision_function(x.row(i)));
        }
        out
    }
}
