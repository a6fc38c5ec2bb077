use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Numerically stable softmax of one logit row.
pub fn softmax_row(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / sum).collect()
}

/// Mean cross-entropy over the masked rows and its gradient w.r.t. the
/// logits (zero on unmasked rows).
pub fn softmax_cross_entropy(
    logits: &Matrix,
    labels: &[usize],
    mask: &[bool],
) -> Result<(f64, Matrix)> {
    let (n, c) = logits.shape();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: labels.len(),
        });
    }
    if mask.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: mask.len(),
        });
    }
    let count = mask.iter().filter(|&&m| m).count();
    if count == 0 {
        return Err(Error::EmptyMask);
    }
    let inv = 1.0 / count as f64;
    let mut loss = 0.0;
    let mut grad = Matrix::zeros(n, c);
    for i in (0..n).filter(|&i| mask[i]) {
        let y = labels[i];
        if y >= c {
            return Err(Error::LabelOutOfRange {
                label: y,
                n_classes: c,
            });
        }
        let row = logits.row(i);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_sum = row.iter().map(|&z| (z - max).exp()).sum::<f64>().ln();
        loss -= row[y] - max - log_sum;
        let g = grad.row_mut(i);
        for (k, gk) in g.iter_mut().enumerate() {
            *gk = (row[k] - max - log_sum).exp() * inv;
        }
        g[y] -= inv;
    }
    Ok((loss * inv, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_logits() {
        let (loss, _) = softmax_cross_entropy(&Matrix::zeros(3, 2), &[0, 1, 0], &[true; 3]).unwrap();
        assert!((loss - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn saturated_row_stays_finite() {
        let logits = Matrix::from_rows(&[[1000.0, 0.0]]);
        let (loss, grad) = softmax_cross_entropy(&logits, &[0], &[true]).unwrap();
        assert!(loss.is_finite() && loss.abs() < 1e-12);
        assert!(grad.is_finite());
    }

    #[test]
    fn unmasked_rows_have_zero_gradient() {
        let logits = Matrix::from_rows(&[[1.0, 2.0], [0.5, -0.5]]);
        let (_, grad) = softmax_cross_entropy(&logits, &[0, 1], &[true, false]).unwrap();
        assert_eq!(grad.row(1), &[0.0, 0.0]);
        assert!((grad.row(0).iter().sum::<f64>()).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        let logits = Matrix::zeros(2, 2);
        assert!(matches!(
            softmax_cross_entropy(&logits, &[0, 1], &[false, false]),
            Err(Error::EmptyMask)
        ));
        assert!(matches!(
            softmax_cross_entropy(&logits, &[0, 2], &[true, true]),
            Err(Error::LabelOutOfRange { label: 2, n_classes: 2 })
        ));
    }
}
