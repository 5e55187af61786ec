//! One-sided (Hestenes) Jacobi SVD for the small Jacobians used by the
//! diagnostics. Always runs in native double precision.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative cut below which a singular value is treated as zero.
pub const RANK_CUT: f64 = 1e-8;
pub const MAX_SWEEPS: usize = 100;
const ORTHO_TOL: f64 = 1e-15;

/// `A = left * diag(singular_values) * right^T` with square orthogonal
/// `left` (p x p) and `right` (q x q).
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub left: DMatrix<f64>,
    /// Descending, `min(p, q)` entries.
    pub singular_values: Vec<f64>,
    pub right: DMatrix<f64>,
    /// Number of singular values at or above `RANK_CUT * sigma_max`.
    pub rank: usize,
}

pub fn svd_small(a: &DMatrix<f64>) -> Result<Svd> {
    let (p, q) = a.shape();
    let mut w = a.clone();
    let mut v = DMatrix::<f64>::identity(q, q);

    // Columns below this squared norm are treated as exact zeros.
    let floor = (1e-15 * a.norm()).powi(2);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..q {
            for j in i + 1..q {
                let alpha = w.column(i).norm_squared();
                let beta = w.column(j).norm_squared();
                let gamma = w.column(i).dot(&w.column(j));
                if alpha <= floor || beta <= floor || gamma.abs() <= ORTHO_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..q).collect();
    let norms: Vec<f64> = (0..q).map(|j| w.column(j).norm()).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));

    let k = p.min(q);
    let singular_values: Vec<f64> = order.iter().take(k).map(|&j| norms[j]).collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let rank = singular_values
        .iter()
        .take_while(|&&s| sigma_max > 0.0 && s >= RANK_CUT * sigma_max)
        .count();

    let right = DMatrix::from_fn(q, q, |r, c| v[(r, order[c])]);
    let mut left_cols: Vec<DVector<f64>> = order
        .iter()
        .take(rank)
        .map(|&j| w.column(j) / norms[j])
        .collect();
    complete_basis(&mut left_cols, p);
    let left = DMatrix::from_columns(&left_cols);

    Ok(Svd {
        left,
        singular_values,
        right,
        rank,
    })
}

fn rotate(m: &mut DMatrix<f64>, i: usize, j: usize, c: f64, s: f64) {
    for r in 0..m.nrows() {
        let (x, y) = (m[(r, i)], m[(r, j)]);
        m[(r, i)] = c * x - s * y;
        m[(r, j)] = s * x + c * y;
    }
}

/// Extends orthonormal `cols` to a basis of R^dim using the coordinate
/// vectors, with two Gram-Schmidt passes per candidate.
fn complete_basis(cols: &mut Vec<DVector<f64>>, dim: usize) {
    for e in 0..dim {
        if cols.len() == dim {
            break;
        }
        let mut cand = DVector::<f64>::zeros(dim);
        cand[e] = 1.0;
        for _ in 0..2 {
            for c in cols.iter() {
                let proj = c.dot(&cand);
                cand -= c * proj;
            }
        }
        let nrm = cand.norm();
        if nrm > 1e-8 {
            cols.push(cand / nrm);
        }
    }
}

impl Svd {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let (p, q) = (self.left.nrows(), self.right.nrows());
        let mut s = DMatrix::zeros(p, q);
        for (i, &sv) in self.singular_values.iter().enumerate() {
            s[(i, i)] = sv;
        }
        &self.left * s * self.right.transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn orthogonality_error(m: &DMatrix<f64>) -> f64 {
        (m.transpose() * m - DMatrix::identity(m.ncols(), m.ncols())).amax()
    }

    #[test]
    fn diagonal_input() {
        let s = svd_small(&dmatrix![2.0, 0.0; 0.0, 1.0]).unwrap();
        assert_eq!(s.singular_values, vec![2.0, 1.0]);
        assert_eq!(s.left, DMatrix::identity(2, 2));
        assert_eq!(s.right, DMatrix::identity(2, 2));
        assert_eq!(s.rank, 2);
    }

    #[test]
    fn rank_one_two_circles_jacobian() {
        let a = dmatrix![-2.0 / 3.0, -4.0 / 3.0; 0.0, 0.0];
        let s = svd_small(&a).unwrap();
        assert!((s.singular_values[0] - 2.0 * 5f64.sqrt() / 3.0).abs() < 1e-14);
        assert!(s.singular_values[1].abs() < 1e-14);
        assert_eq!(s.rank, 1);
        let null = s.right.column(1);
        let expected = [2.0 / 5f64.sqrt(), -1.0 / 5f64.sqrt()];
        let sign = null[0].signum();
        assert!((sign * null[0] - expected[0]).abs() < 1e-12);
        assert!((sign * null[1] - expected[1]).abs() < 1e-12);
        assert!((&a * null).amax() < 1e-14);
    }

    #[test]
    fn random_three_by_three_reconstructs() {
        let a = dmatrix![0.3, -1.2, 0.7; 2.1, 0.4, -0.9; -0.5, 1.6, 0.2];
        let s = svd_small(&a).unwrap();
        assert!((s.reconstruct() - &a).amax() < 1e-12);
        assert!(orthogonality_error(&s.left) < 1e-12);
        assert!(orthogonality_error(&s.right) < 1e-12);
        assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rectangular_shapes() {
        let wide = dmatrix![1.0, 2.0, 3.0; 4.0, 5.0, 6.0];
        let tall = wide.transpose();
        for a in [wide, tall] {
            let s = svd_small(&a).unwrap();
            assert_eq!(s.singular_values.len(), 2);
            assert!((s.reconstruct() - &a).amax() < 1e-12);
            assert!(orthogonality_error(&s.left) < 1e-12);
            assert!(orthogonality_error(&s.right) < 1e-12);
        }
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let s = svd_small(&DMatrix::zeros(2, 3)).unwrap();
        assert_eq!(s.rank, 0);
        assert!(orthogonality_error(&s.left) < 1e-15);
    }
}
