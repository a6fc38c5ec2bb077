//! Principal component analysis on a covariance matrix diagonalized with
//! cyclic Jacobi rotations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Off-diagonal magnitude below which a Jacobi sweep is considered converged.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// k × d, orthonormal rows in descending-eigenvalue order.
    pub components: Matrix,
    /// Variance ratio of each kept component.
    pub explained_variance_ratio: Vec<f64>,
    /// All d covariance eigenvalues, descending and clamped at zero.
    pub eigenvalues: Vec<f64>,
}

impl PcaModel {
    pub fn k(&self) -> usize {
        self.components.rows()
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Variance ratio of all d components; sums to one.
    pub fn full_variance_ratio(&self) -> Vec<f64> {
        let total: f64 = self.eigenvalues.iter().sum();
        self.eigenvalues.iter().map(|l| l / total).collect()
    }

    /// Maps component scores back into the original space.
    pub fn reconstruct(&self, scores: &[f64]) -> Result<Vec<f64>> {
        if scores.len() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                actual: scores.len(),
            });
        }
        let mut x = self.mean.clone();
        for (i, &s) in scores.iter().enumerate() {
            for (xj, &cj) in x.iter_mut().zip(self.components.row(i)) {
                *xj += s * cj;
            }
        }
        Ok(x)
    }
}

/// Eigen-decomposition of a symmetric matrix. Returns eigenvalues (unsorted)
/// and a matrix whose columns are the matching unit eigenvectors.
pub fn jacobi_eigen(symmetric: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let n = symmetric.rows();
    if symmetric.cols() != n {
        return Err(Error::shape("square matrix", format!("{:?}", symmetric.shape())));
    }
    if !symmetric.is_finite() {
        return Err(Error::NonFinite("eigen-decomposition input"));
    }
    let mut a = symmetric.clone();
    let mut v = Matrix::identity(n);
    let scale = a.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = JACOBI_TOLERANCE * scale.max(1.0);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off < tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < tol * 1e-3 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[(i, i)]).collect();
    Ok((values, v))
}

/// Fits PCA keeping the fewest leading components whose variance ratios sum
/// to at least `variance_threshold`.
pub fn pca_fit(data: &Matrix, variance_threshold: f64) -> Result<PcaModel> {
    let (n, d) = data.shape();
    if n < 2 || d < 1 {
        return Err(Error::DegenerateData(format!(
            "PCA needs at least 2 rows and 1 column, got {n}x{d}"
        )));
    }
    if !(variance_threshold > 0.0 && variance_threshold <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "variance threshold must be in (0,1], got {variance_threshold}"
        )));
    }
    if !data.is_finite() {
        return Err(Error::NonFinite("PCA input"));
    }

    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (m, &x) in mean.iter_mut().zip(data.row(i)) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = Matrix::zeros(d, d);
    for i in 0..n {
        let centered: Vec<f64> = data.row(i).iter().zip(&mean).map(|(x, m)| x - m).collect();
        for p in 0..d {
            for q in p..d {
                cov[(p, q)] += centered[p] * centered[q];
            }
        }
    }
    for p in 0..d {
        for q in p..d {
            let v = cov[(p, q)] / (n - 1) as f64;
            cov[(p, q)] = v;
            cov[(q, p)] = v;
        }
    }
    let total: f64 = (0..d).map(|i| cov[(i, i)]).sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::DegenerateData("zero total variance".into()));
    }

    let (values, vectors) = jacobi_eigen(&cov)?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| values[i].max(0.0)).collect();
    let sum: f64 = eigenvalues.iter().sum();
    let ratios: Vec<f64> = eigenvalues.iter().map(|l| l / sum).collect();

    let mut k = d;
    let mut cumulative = 0.0;
    for (i, r) in ratios.iter().enumerate() {
        cumulative += r;
        if cumulative >= variance_threshold - 1e-12 {
            k = i + 1;
            break;
        }
    }

    let mut components = Matrix::zeros(k, d);
    for (row, &col) in order.iter().take(k).enumerate() {
        let mut v: Vec<f64> = (0..d).map(|j| vectors[(j, col)]).collect();
        // Largest-magnitude entry positive; first one wins on ties.
        let mut pivot = 0;
        for j in 1..d {
            if v[j].abs() > v[pivot].abs() {
                pivot = j;
            }
        }
        if v[pivot] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        components.row_mut(row).copy_from_slice(&v);
    }

    Ok(PcaModel {
        mean,
        components,
        explained_variance_ratio: ratios[..k].to_vec(),
        eigenvalues,
    })
}

/// `components · (x − mean)`.
pub fn pca_project(model: &PcaModel, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            actual: x.len(),
        });
    }
    Ok((0..model.k())
        .map(|i| {
            model
                .components
                .row(i)
                .iter()
                .zip(x.iter().zip(&model.mean))
                .map(|(c, (xi, m))| c * (xi - m))
                .sum()
        })
        .collect())
}
