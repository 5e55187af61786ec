//! Dense factorizations used by the step procedures.
//!
//! All kernels except the SVD take an [`Arith`](crate::precision::Arith)
//! implementation and route every elementary operation through it, so the
//! same code runs natively, at emulated reduced precision, or in
//! double-double.

mod cholesky;
mod ldlt;
mod lu;
mod svd;

pub use cholesky::{cholesky, cholesky_solve, CholeskyFactorization, CompletionFailure};
pub use ldlt::{
    bunch_kaufman, bunch_parlett, growth_factor_bound, pivot_threshold, solve_ldlt, GrowthSample,
    LdltFactorization, MagnitudeClass, PivotKind, PivotRecord, PivotSize,
};
pub use lu::{gepp_solve, GeppLog, GeppSolution};
pub use svd::{svd_small, Svd, MAX_SWEEPS, RANK_CUT};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::precision::Arith;

/// Solves the 2x2 system `r x = rhs` by Gaussian elimination with partial
/// pivoting. Used for the 2x2 pivot blocks of the `LDL^T` factorizations.
pub(crate) fn solve_2x2<A: Arith>(
    ar: &A,
    r: [[A::Real; 2]; 2],
    rhs: [A::Real; 2],
    index: usize,
) -> Result<[A::Real; 2]> {
    let (mut r, mut rhs) = (r, rhs);
    if ar.abs(r[1][0]) > ar.abs(r[0][0]) {
        r.swap(0, 1);
        rhs.swap(0, 1);
    }
    if r[0][0] == ar.zero() {
        return Err(Error::SingularPivot { index });
    }
    let l = ar.div(r[1][0], r[0][0]);
    let u11 = ar.sub(r[1][1], ar.mul(l, r[0][1]));
    let b1 = ar.sub(rhs[1], ar.mul(l, rhs[0]));
    if u11 == ar.zero() {
        return Err(Error::SingularPivot { index });
    }
    let x1 = ar.div(b1, u11);
    let x0 = ar.div(ar.sub(rhs[0], ar.mul(r[0][1], x1)), r[0][0]);
    Ok([x0, x1])
}

/// Converts an `f64` matrix into the representation used by `ar`.
pub fn lift_matrix<A: Arith>(ar: &A, m: &DMatrix<f64>) -> DMatrix<A::Real> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| ar.lit(m[(i, j)]))
}

pub fn lift_vector<A: Arith>(ar: &A, v: &[f64]) -> Vec<A::Real> {
    v.iter().map(|&x| ar.lit(x)).collect()
}

/// Infinity norm (max absolute row sum).
pub fn norm_inf(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::PrecisionConfig;

    #[test]
    fn two_by_two_pivots_on_larger_entry() {
        let pc = PrecisionConfig::native();
        let x = solve_2x2(&pc, [[0.0, 1.0], [1.0, 0.0]], [1.0, 2.0], 0).unwrap();
        assert_eq!(x, [2.0, 1.0]);
    }

    #[test]
    fn two_by_two_singular() {
        let pc = PrecisionConfig::native();
        let err = solve_2x2(&pc, [[1.0, 2.0], [2.0, 4.0]], [1.0, 2.0], 3).unwrap_err();
        assert_eq!(err, Error::SingularPivot { index: 3 });
    }
}
