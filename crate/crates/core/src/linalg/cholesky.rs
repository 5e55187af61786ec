use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::precision::Arith;

/// Lower-triangular Cholesky factor `A = L L^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactorization<T> {
    pub l: DMatrix<T>,
}

/// The factorization met a non-positive pivot. This is an expected outcome
/// once `u * cond(A)` is no longer small, not a programming error.
#[derive(Debug, Clone, Copy, PartialEq, Error, Serialize, Deserialize)]
#[error("Cholesky breakdown at pivot {pivot} (computed value {value:e})")]
pub struct CompletionFailure {
    /// Zero-based position of the offending pivot.
    pub pivot: usize,
    pub value: f64,
}

/// Column-by-column Cholesky. Only the lower triangle of `a` is read.
pub fn cholesky<A: Arith>(
    a: &DMatrix<A::Real>,
    ar: &A,
) -> Result<CholeskyFactorization<A::Real>, CompletionFailure> {
    let n = a.nrows();
    let mut l = DMatrix::from_element(n, n, ar.zero());
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d = ar.sub(d, ar.square(l[(j, k)]));
        }
        // `!(d > 0)` also catches NaN.
        if !(d > ar.zero()) {
            return Err(CompletionFailure {
                pivot: j,
                value: ar.to_f64(d),
            });
        }
        let ljj = ar.sqrt(d);
        l[(j, j)] = ljj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s = ar.sub(s, ar.mul(l[(i, k)], l[(j, k)]));
            }
            l[(i, j)] = ar.div(s, ljj);
        }
    }
    Ok(CholeskyFactorization { l })
}

/// Forward then backward substitution with the Cholesky factor.
pub fn cholesky_solve<A: Arith>(
    f: &CholeskyFactorization<A::Real>,
    b: &[A::Real],
    ar: &A,
) -> Vec<A::Real> {
    let n = f.l.nrows();
    assert_eq!(b.len(), n, "rhs length");
    let l = &f.l;
    let mut y = vec![ar.zero(); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s = ar.sub(s, ar.mul(l[(i, k)], y[k]));
        }
        y[i] = ar.div(s, l[(i, i)]);
    }
    let mut x = vec![ar.zero(); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s = ar.sub(s, ar.mul(l[(k, i)], x[k]));
        }
        x[i] = ar.div(s, l[(i, i)]);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm_inf;
    use crate::precision::PrecisionConfig;
    use nalgebra::dmatrix;

    const PC: PrecisionConfig = PrecisionConfig::native();

    #[test]
    fn identity_factor_is_identity() {
        let f = cholesky(&DMatrix::<f64>::identity(3, 3), &PC).unwrap();
        assert_eq!(f.l, DMatrix::identity(3, 3));
    }

    #[test]
    fn hand_checkable_two_by_two() {
        let f = cholesky(&dmatrix![4.0, 2.0; 2.0, 5.0], &PC).unwrap();
        assert_eq!(f.l, dmatrix![2.0, 0.0; 1.0, 2.0]);
    }

    #[test]
    fn indefinite_fails_at_second_pivot() {
        let err = cholesky(&dmatrix![1.0, 2.0; 2.0, 1.0], &PC).unwrap_err();
        assert_eq!(err.pivot, 1);
        assert_eq!(err.value, -3.0);
    }

    #[test]
    fn upper_triangle_is_ignored() {
        let f = cholesky(&dmatrix![4.0, 99.0; 2.0, 5.0], &PC).unwrap();
        assert_eq!(f.l, dmatrix![2.0, 0.0; 1.0, 2.0]);
    }

    #[test]
    fn reconstruction_bound_on_spd_matrices() {
        // B^T B + n I for a fixed pseudo-random B.
        let n = 7;
        let b = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) % 11) as f64 / 11.0 - 0.4);
        let a = b.transpose() * &b + DMatrix::identity(n, n) * n as f64;
        let f = cholesky(&a, &PC).unwrap();
        let resid = &a - &f.l * f.l.transpose();
        let u = PC.unit_roundoff();
        assert!(norm_inf(&resid) <= 50.0 * u * n as f64 * norm_inf(&a));

        let x_true: Vec<f64> = (0..n).map(|i| i as f64 - 2.5).collect();
        let rhs = &a * nalgebra::DVector::from_vec(x_true.clone());
        let x = cholesky_solve(&f, rhs.as_slice(), &PC);
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).abs() < 1e-12);
        }
    }
}
