use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const DEFAULT_K: usize = 5;

/// Brute-force k-nearest-neighbors under Euclidean distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub train_features: Matrix,
    pub train_labels: Vec<usize>,
    pub k: usize,
    pub n_classes: usize,
}

impl KnnModel {
    pub fn fit(features: Matrix, labels: Vec<usize>, k: usize, n_classes: usize) -> Result<Self> {
        if features.rows() == 0 {
            return Err(Error::EmptyModel);
        }
        if labels.len() != features.rows() {
            return Err(Error::DimensionMismatch {
                expected: features.rows(),
                actual: labels.len(),
            });
        }
        if k == 0 || k > features.rows() {
            return Err(Error::InvalidConfig(format!(
                "k must be in 1..={}, got {k}",
                features.rows()
            )));
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::LabelOutOfRange { label, n_classes });
        }
        if !features.is_finite() {
            return Err(Error::NonFinite("kNN training features"));
        }
        Ok(Self {
            train_features: features,
            train_labels: labels,
            k,
            n_classes,
        })
    }

    /// Majority label of the `k` nearest rows. Distance ties go to the lower
    /// training index, vote ties to the lower class.
    pub fn predict_one(&self, query: &[f64]) -> Result<usize> {
        let n = self.train_features.rows();
        if n == 0 || self.k == 0 {
            return Err(Error::EmptyModel);
        }
        if query.len() != self.train_features.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.train_features.cols(),
                actual: query.len(),
            });
        }
        let mut dist: Vec<(f64, usize)> = (0..n)
            .map(|i| {
                let d = self
                    .train_features
                    .row(i)
                    .iter()
                    .zip(query)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>();
                (d, i)
            })
            .collect();
        let k = self.k.min(n);
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < n {
            dist.select_nth_unstable_by(k - 1, cmp);
        }
        let mut votes = vec![0usize; self.n_classes];
        for &(_, i) in &dist[..k] {
            votes[self.train_labels[i]] += 1;
        }
        let mut best = 0;
        for (c, &v) in votes.iter().enumerate() {
            if v > votes[best] {
                best = c;
            }
        }
        Ok(best)
    }

    pub fn predict(&self, queries: &Matrix) -> Result<Vec<usize>> {
        (0..queries.rows()).map(|i| self.predict_one(queries.row(i))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point() {
        let m = KnnModel::fit(Matrix::from_rows(&[[0.0, 0.0]]), vec![1], 1, 2).unwrap();
        assert_eq!(m.predict_one(&[100.0, -3.0]).unwrap(), 1);
    }

    #[test]
    fn majority_of_three() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [10.0]]);
        let m = KnnModel::fit(x, vec![1, 1, 0, 0], 3, 2).unwrap();
        assert_eq!(m.predict_one(&[0.5]).unwrap(), 1);
    }

    #[test]
    fn distance_tie_prefers_lower_index() {
        let x = Matrix::from_rows(&[[-1.0], [1.0]]);
        let m = KnnModel::fit(x, vec![1, 0], 1, 2).unwrap();
        assert_eq!(m.predict_one(&[0.0]).unwrap(), 1);
    }

    #[test]
    fn vote_tie_prefers_lower_class() {
        let x = Matrix::from_rows(&[[0.0], [1.0]]);
        let m = KnnModel::fit(x, vec![1, 0], 2, 2).unwrap();
        assert_eq!(m.predict_one(&[0.0]).unwrap(), 0);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(
            KnnModel::fit(Matrix::zeros(0, 2), vec![], 1, 2),
            Err(Error::EmptyModel)
        ));
        assert!(KnnModel::fit(Matrix::zeros(2, 1), vec![0, 1], 3, 2).is_err());
        assert!(matches!(
            KnnModel::fit(Matrix::zeros(2, 1), vec![0, 2], 1, 2),
            Err(Error::LabelOutOfRange { .. })
        ));
    }
}
