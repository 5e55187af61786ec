//! Symmetric indefinite `P T P^T = L Y L^T` with 1x1 and 2x2 pivot blocks.
//!
//! Two pivot rules are provided. Bunch-Kaufman inspects at most two columns
//! of the remaining matrix per step; Bunch-Parlett searches the whole
//! remaining matrix. Both use the growth constant `nu = (1 + sqrt(17)) / 8`
//! and break ties by taking the smallest index. Every chosen pivot is logged
//! so callers can audit where large diagonal entries ended up.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::solve_2x2;
use crate::error::{Error, Result};
use crate::precision::Arith;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PivotSize {
    OneByOne,
    TwoByTwo,
}

/// Pivot types relative to a duality measure `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PivotKind {
    OneByOneSmall,
    TwoByTwo,
    OneByOneLarge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MagnitudeClass {
    /// Bounded independently of `mu`.
    OrderOne,
    /// Of size `1/mu`.
    InverseMu,
}

/// A diagonal is classified as `InverseMu` when `|T_ii| >= 1 / (10 mu)`.
pub fn pivot_threshold(mu: f64) -> f64 {
    1.0 / (10.0 * mu)
}

/// Bound on the largest remaining element after `steps` eliminated columns,
/// relative to the initial largest element.
pub fn growth_factor_bound(steps: usize) -> f64 {
    3f64.powi(steps as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivotRecord {
    pub size: PivotSize,
    /// Position of the (first row of the) block in the factor ordering.
    pub position: usize,
    /// Original row indices of the block, in block order.
    pub indices: Vec<usize>,
    /// Diagonal entries of the pivot block when it was selected.
    pub diagonals: Vec<f64>,
}

impl PivotRecord {
    pub fn magnitude_classes(&self, mu: f64) -> Vec<MagnitudeClass> {
        let cut = pivot_threshold(mu);
        self.diagonals
            .iter()
            .map(|d| {
                if d.abs() >= cut {
                    MagnitudeClass::InverseMu
                } else {
                    MagnitudeClass::OrderOne
                }
            })
            .collect()
    }

    pub fn has_large_diagonal(&self, mu: f64) -> bool {
        self.magnitude_classes(mu).contains(&MagnitudeClass::InverseMu)
    }

    pub fn kind(&self, mu: f64) -> PivotKind {
        match self.size {
            PivotSize::TwoByTwo => PivotKind::TwoByTwo,
            PivotSize::OneByOne if self.has_large_diagonal(mu) => PivotKind::OneByOneLarge,
            PivotSize::OneByOne => PivotKind::OneByOneSmall,
        }
    }
}

/// Largest remaining element after `eliminated` columns have been factored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample {
    pub eliminated: usize,
    pub max_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdltFactorization<T> {
    /// `perm[k]` is the original index moved to position `k`.
    pub perm: Vec<usize>,
    /// Unit lower triangular factor.
    pub l: DMatrix<T>,
    /// Block diagonal factor.
    pub y: DMatrix<T>,
    pub pivot_log: Vec<PivotRecord>,
    pub growth: Vec<GrowthSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Choice {
    One(usize),
    Two(usize, usize),
}

fn nu<A: Arith>(ar: &A) -> A::Real {
    ar.div(ar.add(ar.one(), ar.sqrt(ar.lit(17.0))), ar.lit(8.0))
}

fn bunch_kaufman_choice<A: Arith>(w: &DMatrix<A::Real>, k: usize, ar: &A) -> Choice {
    let n = w.nrows();
    if k + 1 == n {
        return Choice::One(k);
    }
    let nu = nu(ar);
    let mut chi_1 = ar.zero();
    let mut r = k + 1;
    for j in k + 1..n {
        let v = ar.abs(w[(j, k)]);
        if v > chi_1 {
            chi_1 = v;
            r = j;
        }
    }
    let t_11 = ar.abs(w[(k, k)]);
    if t_11 >= ar.mul(nu, chi_1) {
        return Choice::One(k);
    }
    let mut chi_r = ar.zero();
    for j in k..n {
        if j != r {
            let v = ar.abs(w[(j, r)]);
            if v > chi_r {
                chi_r = v;
            }
        }
    }
    if ar.mul(chi_r, t_11) >= ar.mul(nu, ar.square(chi_1)) {
        Choice::One(k)
    } else if ar.abs(w[(r, r)]) >= ar.mul(nu, chi_r) {
        Choice::One(r)
    } else {
        Choice::Two(k, r)
    }
}

fn bunch_parlett_choice<A: Arith>(w: &DMatrix<A::Real>, k: usize, ar: &A) -> Choice {
    let n = w.nrows();
    if k + 1 == n {
        return Choice::One(k);
    }
    let mut chi_off = ar.zero();
    let (mut r, mut s) = (k, k + 1);
    for i in k..n {
        for j in i + 1..n {
            let v = ar.abs(w[(j, i)]);
            if v > chi_off {
                chi_off = v;
                r = i;
                s = j;
            }
        }
    }
    let mut chi_diag = ar.zero();
    let mut p = k;
    for i in k..n {
        let v = ar.abs(w[(i, i)]);
        if v > chi_diag {
            chi_diag = v;
            p = i;
        }
    }
    if chi_diag >= ar.mul(nu(ar), chi_off) {
        Choice::One(p)
    } else {
        Choice::Two(r, s)
    }
}

/// Symmetric interchange of positions `i <= j`, carrying along the
/// already-computed columns of `l`.
fn interchange<T: nalgebra::Scalar + Copy>(
    w: &mut DMatrix<T>,
    l: &mut DMatrix<T>,
    perm: &mut [usize],
    i: usize,
    j: usize,
) {
    if i == j {
        return;
    }
    w.swap_rows(i, j);
    w.swap_columns(i, j);
    perm.swap(i, j);
    for c in 0..i.min(j) {
        let tmp = l[(i, c)];
        l[(i, c)] = l[(j, c)];
        l[(j, c)] = tmp;
    }
}

fn max_abs_remaining<A: Arith>(w: &DMatrix<A::Real>, from: usize, ar: &A) -> f64 {
    let n = w.nrows();
    let mut m = 0.0f64;
    for j in from..n {
        for i in from..n {
            m = m.max(ar.to_f64(ar.abs(w[(i, j)])));
        }
    }
    m
}

fn factor<A, S>(t: &DMatrix<A::Real>, ar: &A, select: S) -> Result<LdltFactorization<A::Real>>
where
    A: Arith,
    S: Fn(&DMatrix<A::Real>, usize, &A) -> Choice,
{
    let n = t.nrows();
    if t.ncols() != n {
        return Err(Error::Dimension(format!("{}x{} is not square", n, t.ncols())));
    }
    // Work on a symmetric copy built from the lower triangle.
    let mut w = DMatrix::from_fn(n, n, |i, j| if i >= j { t[(i, j)] } else { t[(j, i)] });
    let mut l = DMatrix::from_fn(n, n, |i, j| if i == j { ar.one() } else { ar.zero() });
    let mut y = DMatrix::from_element(n, n, ar.zero());
    let mut perm: Vec<usize> = (0..n).collect();
    let mut pivot_log = Vec::new();
    let mut growth = vec![GrowthSample {
        eliminated: 0,
        max_abs: max_abs_remaining(&w, 0, ar),
    }];

    let mut k = 0;
    while k < n {
        match select(&w, k, ar) {
            Choice::One(r) => {
                interchange(&mut w, &mut l, &mut perm, k, r);
                let d = w[(k, k)];
                if d == ar.zero() {
                    return Err(Error::SingularPivot { index: perm[k] });
                }
                pivot_log.push(PivotRecord {
                    size: PivotSize::OneByOne,
                    position: k,
                    indices: vec![perm[k]],
                    diagonals: vec![ar.to_f64(d)],
                });
                for i in k + 1..n {
                    l[(i, k)] = ar.div(w[(i, k)], d);
                }
                for j in k + 1..n {
                    for i in j..n {
                        let v = ar.sub(w[(i, j)], ar.mul(l[(i, k)], w[(j, k)]));
                        w[(i, j)] = v;
                        w[(j, i)] = v;
                    }
                }
                y[(k, k)] = d;
                k += 1;
            }
            Choice::Two(a, b) => {
                interchange(&mut w, &mut l, &mut perm, k, a);
                let b = if b == k { a } else { b };
                interchange(&mut w, &mut l, &mut perm, k + 1, b);
                let r = [
                    [w[(k, k)], w[(k + 1, k)]],
                    [w[(k + 1, k)], w[(k + 1, k + 1)]],
                ];
                // Reject a singular block even when there is nothing left to eliminate.
                solve_2x2(ar, r, [ar.zero(), ar.zero()], perm[k])?;
                pivot_log.push(PivotRecord {
                    size: PivotSize::TwoByTwo,
                    position: k,
                    indices: vec![perm[k], perm[k + 1]],
                    diagonals: vec![ar.to_f64(r[0][0]), ar.to_f64(r[1][1])],
                });
                for i in k + 2..n {
                    let [l0, l1] = solve_2x2(ar, r, [w[(i, k)], w[(i, k + 1)]], perm[k])?;
                    l[(i, k)] = l0;
                    l[(i, k + 1)] = l1;
                }
                for j in k + 2..n {
                    for i in j..n {
                        let upd = ar.add(
                            ar.mul(l[(i, k)], w[(j, k)]),
                            ar.mul(l[(i, k + 1)], w[(j, k + 1)]),
                        );
                        let v = ar.sub(w[(i, j)], upd);
                        w[(i, j)] = v;
                        w[(j, i)] = v;
                    }
                }
                y[(k, k)] = r[0][0];
                y[(k + 1, k)] = r[1][0];
                y[(k, k + 1)] = r[1][0];
                y[(k + 1, k + 1)] = r[1][1];
                k += 2;
            }
        }
        growth.push(GrowthSample {
            eliminated: k,
            max_abs: max_abs_remaining(&w, k, ar),
        });
    }

    Ok(LdltFactorization {
        perm,
        l,
        y,
        pivot_log,
        growth,
    })
}

/// Bunch-Kaufman partial diagonal pivoting. Reads the lower triangle of `t`.
pub fn bunch_kaufman<A: Arith>(t: &DMatrix<A::Real>, ar: &A) -> Result<LdltFactorization<A::Real>> {
    factor(t, ar, bunch_kaufman_choice)
}

/// Bunch-Parlett complete diagonal pivoting. Reads the lower triangle of `t`.
pub fn bunch_parlett<A: Arith>(t: &DMatrix<A::Real>, ar: &A) -> Result<LdltFactorization<A::Real>> {
    factor(t, ar, bunch_parlett_choice)
}

/// Solves `T x = b` from `P T P^T = L Y L^T`; 2x2 blocks use partial pivoting.
pub fn solve_ldlt<A: Arith>(
    f: &LdltFactorization<A::Real>,
    b: &[A::Real],
    ar: &A,
) -> Result<Vec<A::Real>> {
    let n = f.perm.len();
    if b.len() != n {
        return Err(Error::Dimension(format!("rhs has {} entries, expected {n}", b.len())));
    }
    let mut y: Vec<A::Real> = f.perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        for j in 0..i {
            y[i] = ar.sub(y[i], ar.mul(f.l[(i, j)], y[j]));
        }
    }
    for rec in &f.pivot_log {
        let k = rec.position;
        match rec.size {
            PivotSize::OneByOne => {
                if f.y[(k, k)] == ar.zero() {
                    return Err(Error::SingularPivot { index: f.perm[k] });
                }
                y[k] = ar.div(y[k], f.y[(k, k)]);
            }
            PivotSize::TwoByTwo => {
                let r = [
                    [f.y[(k, k)], f.y[(k + 1, k)]],
                    [f.y[(k + 1, k)], f.y[(k + 1, k + 1)]],
                ];
                let [a, c] = solve_2x2(ar, r, [y[k], y[k + 1]], f.perm[k])?;
                y[k] = a;
                y[k + 1] = c;
            }
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            y[i] = ar.sub(y[i], ar.mul(f.l[(j, i)], y[j]));
        }
    }
    let mut x = vec![ar.zero(); n];
    for (k, &p) in f.perm.iter().enumerate() {
        x[p] = y[k];
    }
    Ok(x)
}

impl LdltFactorization<f64> {
    /// `L Y L^T` in factor ordering.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.l * &self.y * self.l.transpose()
    }

    /// `P T P^T` for the matrix that was factored.
    pub fn permute(&self, t: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.perm.len();
        DMatrix::from_fn(n, n, |a, b| t[(self.perm[a], self.perm[b])])
    }

    /// `|L| |Y| |L^T|` in factor ordering.
    pub fn abs_product(&self) -> DMatrix<f64> {
        let la = self.l.abs();
        &la * self.y.abs() * la.transpose()
    }

    /// `P^T |L| |Y| |L^T| P`, i.e. the absolute factor product mapped back to
    /// the original row and column indices.
    pub fn abs_product_original(&self) -> DMatrix<f64> {
        let m = self.abs_product();
        let n = self.perm.len();
        let mut out = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                out[(self.perm[a], self.perm[b])] = m[(a, b)];
            }
        }
        out
    }

    pub fn two_by_two_count(&self) -> usize {
        self.pivot_log
            .iter()
            .filter(|p| p.size == PivotSize::TwoByTwo)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm_inf;
    use crate::precision::PrecisionConfig;
    use nalgebra::{dmatrix, DVector};

    const PC: PrecisionConfig = PrecisionConfig::native();

    fn pseudo_random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
        let mut s = seed.wrapping_mul(0x2545_F491_4F6C_DD1D) | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = next();
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    #[test]
    fn nu_is_the_growth_constant() {
        assert!((nu(&PC) - (1.0 + 17f64.sqrt()) / 8.0).abs() < 1e-16);
    }

    #[test]
    fn bk_diagonal_takes_natural_order() {
        let f = bunch_kaufman(&DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 2.0, 1.0])), &PC)
            .unwrap();
        assert_eq!(f.perm, vec![0, 1, 2]);
        assert_eq!(f.l, DMatrix::identity(3, 3));
        assert!(f.pivot_log.iter().all(|p| p.size == PivotSize::OneByOne));
    }

    #[test]
    fn bk_zero_diagonal_takes_two_by_two() {
        let f = bunch_kaufman(&dmatrix![0.0, 1.0; 1.0, 0.0], &PC).unwrap();
        assert_eq!(f.pivot_log.len(), 1);
        assert_eq!(f.pivot_log[0].size, PivotSize::TwoByTwo);
        let x = solve_ldlt(&f, &[1.0, 2.0], &PC).unwrap();
        assert_eq!(x, vec![2.0, 1.0]);
    }

    #[test]
    fn bk_moves_dominant_diagonal_forward() {
        // |T_11| fails, chi_r |T_11| fails, |T_rr| >= nu chi_r passes.
        let t = dmatrix![0.0, 1.0, 0.0; 1.0, 5.0, 0.5; 0.0, 0.5, 1.0];
        let f = bunch_kaufman(&t, &PC).unwrap();
        assert_eq!(f.pivot_log[0].size, PivotSize::OneByOne);
        assert_eq!(f.pivot_log[0].indices, vec![1]);
    }

    #[test]
    fn bp_selects_large_diagonal_first() {
        let t = dmatrix![1e8, 1.0, 0.5; 1.0, 0.0, 1.0; 0.5, 1.0, 0.0];
        let f = bunch_parlett(&t, &PC).unwrap();
        assert_eq!(f.pivot_log[0].size, PivotSize::OneByOne);
        assert_eq!(f.pivot_log[0].indices, vec![0]);
    }

    #[test]
    fn bp_diagonal_order_is_largest_first() {
        let f = bunch_parlett(&DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0])), &PC)
            .unwrap();
        let order: Vec<usize> = f.pivot_log.iter().map(|p| p.indices[0]).collect();
        assert_eq!(order, vec![2, 1, 0]);
    }

    #[test]
    fn identity_solve_is_identity() {
        let f = bunch_kaufman(&DMatrix::<f64>::identity(4, 4), &PC).unwrap();
        let b = [1.0, -2.0, 3.5, 0.25];
        assert_eq!(solve_ldlt(&f, &b, &PC).unwrap(), b.to_vec());
    }

    #[test]
    fn singular_pivot_is_reported() {
        let err = bunch_kaufman(&DMatrix::<f64>::zeros(2, 2), &PC).unwrap_err();
        assert_eq!(err, Error::SingularPivot { index: 0 });
        let err = bunch_parlett(&dmatrix![1.0, 1.0; 1.0, 1.0], &PC).unwrap_err();
        assert!(matches!(err, Error::SingularPivot { .. }));
    }

    #[test]
    fn random_symmetric_residual_and_reconstruction() {
        let u = PC.unit_roundoff();
        for seed in 1..=20u64 {
            let t = pseudo_random_symmetric(6, seed);
            for f in [bunch_kaufman(&t, &PC).unwrap(), bunch_parlett(&t, &PC).unwrap()] {
                let recon = f.permute(&t) - f.reconstruct();
                assert!(norm_inf(&recon) <= 50.0 * u * norm_inf(&f.abs_product()));

                let b: Vec<f64> = (0..6).map(|i| (i as f64).sin()).collect();
                let x = solve_ldlt(&f, &b, &PC).unwrap();
                let r = &t * DVector::from_vec(x.clone()) - DVector::from_vec(b);
                let xn = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                assert!(r.amax() <= 1e-12 * norm_inf(&t) * xn);
            }
        }
    }

    #[test]
    fn growth_stays_below_three_per_column() {
        for seed in 1..=20u64 {
            let t = pseudo_random_symmetric(8, seed);
            for f in [bunch_kaufman(&t, &PC).unwrap(), bunch_parlett(&t, &PC).unwrap()] {
                let first = f.growth[0].max_abs;
                for g in &f.growth {
                    assert!(g.max_abs <= growth_factor_bound(g.eliminated) * first);
                }
            }
        }
    }

    #[test]
    fn magnitude_classification_uses_threshold() {
        let rec = PivotRecord {
            size: PivotSize::OneByOne,
            position: 0,
            indices: vec![4],
            diagonals: vec![-1.0e7],
        };
        assert_eq!(rec.kind(1e-8), PivotKind::OneByOneLarge);
        assert_eq!(rec.kind(1e-9), PivotKind::OneByOneSmall);
    }
}
