use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::Arith;

#[derive(Debug, Clone, PartialEq)]
pub struct GeppSolution<T> {
    pub x: Vec<T>,
    /// Row chosen as pivot at each elimination step (current row numbering).
    pub row_pivots: Vec<usize>,
    /// Largest element of the active submatrix, before and after each step.
    pub growth: Vec<f64>,
}

/// Serializable summary of a GEPP solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeppLog {
    pub row_pivots: Vec<usize>,
    pub growth: Vec<f64>,
}

impl<T> GeppSolution<T> {
    pub fn log(&self) -> GeppLog {
        GeppLog {
            row_pivots: self.row_pivots.clone(),
            growth: self.growth.clone(),
        }
    }
}

/// Gaussian elimination with partial (row) pivoting; symmetry is ignored.
///
/// The pivot is the first row holding the largest magnitude in the current
/// column. Multipliers are formed by division.
pub fn gepp_solve<A: Arith>(a: &DMatrix<A::Real>, b: &[A::Real], ar: &A) -> Result<GeppSolution<A::Real>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::Dimension(format!(
            "{}x{} system with {} right-hand side entries",
            n,
            a.ncols(),
            b.len()
        )));
    }
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let mut row_pivots = Vec::with_capacity(n);
    let active_max = |m: &DMatrix<A::Real>, k: usize| {
        let mut v = 0.0f64;
        for j in k..n {
            for i in k..n {
                v = v.max(ar.to_f64(ar.abs(m[(i, j)])));
            }
        }
        v
    };
    let mut growth = vec![active_max(&m, 0)];

    for k in 0..n {
        let mut p = k;
        let mut best = ar.abs(m[(k, k)]);
        for i in k + 1..n {
            let v = ar.abs(m[(i, k)]);
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == ar.zero() {
            return Err(Error::SingularMatrix { column: k });
        }
        row_pivots.push(p);
        if p != k {
            m.swap_rows(k, p);
            rhs.swap(k, p);
        }
        let pivot = m[(k, k)];
        for i in k + 1..n {
            let l = ar.div(m[(i, k)], pivot);
            for j in k + 1..n {
                m[(i, j)] = ar.sub(m[(i, j)], ar.mul(l, m[(k, j)]));
            }
            rhs[i] = ar.sub(rhs[i], ar.mul(l, rhs[k]));
        }
        growth.push(active_max(&m, k + 1));
    }

    let mut x = vec![ar.zero(); n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s = ar.sub(s, ar.mul(m[(i, j)], x[j]));
        }
        x[i] = ar.div(s, m[(i, i)]);
    }
    Ok(GeppSolution { x, row_pivots, growth })
}
