use crate::error::{Error, Result};
use crate::graph::Adjacency;
use crate::matrix::Matrix;

/// Row `i` becomes the mean of the rows of `i`'s neighbors; isolated nodes
/// get a zero row.
pub fn sage_mean_aggregate(x: &Matrix, adj: &Adjacency) -> Result<Matrix> {
    check_rows(x, adj)?;
    let mut out = Matrix::zeros(x.rows(), x.cols());
    for i in 0..adj.node_count() {
        let nbrs = adj.neighbors(i);
        if nbrs.is_empty() {
            continue;
        }
        let dst = out.row_mut(i);
        for &j in nbrs {
            for (d, &v) in dst.iter_mut().zip(x.row(j)) {
                *d += v;
            }
        }
        let deg = nbrs.len() as f64;
        dst.iter_mut().for_each(|d| *d /= deg);
    }
    Ok(out)
}

/// Adjoint of [`sage_mean_aggregate`]: every node `i` pushes `g_i / deg(i)`
/// onto each of its neighbors.
pub fn sage_mean_aggregate_transpose(g: &Matrix, adj: &Adjacency) -> Result<Matrix> {
    check_rows(g, adj)?;
    let mut out = Matrix::zeros(g.rows(), g.cols());
    for i in 0..adj.node_count() {
        let nbrs = adj.neighbors(i);
        if nbrs.is_empty() {
            continue;
        }
        let deg = nbrs.len() as f64;
        let src: Vec<f64> = g.row(i).iter().map(|v| v / deg).collect();
        for &j in nbrs {
            for (d, &v) in out.row_mut(j).iter_mut().zip(&src) {
                *d += v;
            }
        }
    }
    Ok(out)
}

fn check_rows(x: &Matrix, adj: &Adjacency) -> Result<()> {
    if x.rows() != adj.node_count() {
        return Err(Error::shape(
            format!("{} rows", adj.node_count()),
            format!("{} rows", x.rows()),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_swaps_rows() {
        let adj = Adjacency::from_edges(2, &[(0, 1)]);
        let x = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]);
        let a = sage_mean_aggregate(&x, &adj).unwrap();
        assert_eq!(a.row(0), &[0.0, 1.0]);
        assert_eq!(a.row(1), &[1.0, 0.0]);
    }

    #[test]
    fn isolated_node_is_zero() {
        let adj = Adjacency::from_edges(3, &[(0, 1)]);
        let x = Matrix::from_rows(&[[1.0], [2.0], [5.0]]);
        assert_eq!(sage_mean_aggregate(&x, &adj).unwrap().row(2), &[0.0]);
    }

    #[test]
    fn transpose_is_adjoint() {
        // <A x, g> == <x, Aᵀ g>
        let adj = Adjacency::from_edges(4, &[(0, 1), (1, 2), (1, 3)]);
        let x = Matrix::from_rows(&[[1.0, -2.0], [0.5, 3.0], [2.0, 1.0], [-1.0, 0.25]]);
        let g = Matrix::from_rows(&[[0.3, 1.0], [-0.7, 2.0], [1.5, -1.0], [0.2, 0.1]]);
        let ax = sage_mean_aggregate(&x, &adj).unwrap();
        let atg = sage_mean_aggregate_transpose(&g, &adj).unwrap();
        let lhs = crate::matrix::dot(ax.as_slice(), g.as_slice());
        let rhs = crate::matrix::dot(x.as_slice(), atg.as_slice());
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn wrong_row_count() {
        let adj = Adjacency::from_edges(2, &[(0, 1)]);
        assert!(matches!(
            sage_mean_aggregate(&Matrix::zeros(3, 1), &adj),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
