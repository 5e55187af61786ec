//! Built-in test problems `min phi(z) s.t. g(z) <= 0` with known solutions.
//!
//! Evaluators are generic over [`Arith`] so that function values, gradients
//! and Hessians carry the rounding of the working precision. Expressions are
//! evaluated in the order in which the constraint formulas are written, e.g.
//! `((z1 - 1/3)^2 + z2^2) - 1/9`, because the cancellation behaviour of the
//! step computation depends on it.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::svd_small;
use crate::precision::{Arith, PrecisionConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NlpProblem {
    /// `min z1` inside two circles that touch at the origin.
    TwoCircles,
    /// Same feasible point and multipliers, second circle replaced by an ellipse.
    TwoCirclesModified,
    /// `min z^2/2` s.t. `-z <= 0`; the only multiplier is zero (no strict complementarity).
    ScalarQuadratic,
    /// `TwoCircles` plus a third, inactive circle constraint.
    ThreeCircles,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Iterate<T = f64> {
    pub z: Vec<T>,
    pub lambda: Vec<T>,
    pub s: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Gradient of the Lagrangian.
    pub r_f: Vec<f64>,
    /// `g(z) + s`.
    pub r_g: Vec<f64>,
    /// `lambda^T s / m`.
    pub mu: f64,
}

/// Orthogonal bases from the SVD `grad g_B(z*) = U_hat Sigma U^T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdBasis {
    /// n x r.
    pub u_hat: DMatrix<f64>,
    /// n x (n - r).
    pub v_hat: DMatrix<f64>,
    /// |B| x r.
    pub u: DMatrix<f64>,
    /// |B| x (|B| - r); spans the null space of `grad g_B(z*)`.
    pub v: DMatrix<f64>,
    pub sigma: Vec<f64>,
}

/// The optimal multipliers restricted to `B` form `{l >= 0 : a^T l = b}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSegment {
    pub a: Vec<f64>,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownSolution {
    pub z_star: Vec<f64>,
    /// Zero-based indices with `g_i(z*) = 0`, ascending.
    pub active: Vec<usize>,
    pub inactive: Vec<usize>,
    pub multiplier_affine: MultiplierSegment,
    pub svd: SvdBasis,
    pub strictly_complementary: bool,
}

impl Iterate<f64> {
    pub fn new(z: Vec<f64>, lambda: Vec<f64>, s: Vec<f64>) -> Self {
        Self { z, lambda, s }
    }

    /// `lambda^T s / m` in native arithmetic.
    pub fn mu(&self) -> f64 {
        dot(&self.lambda, &self.s) / self.lambda.len() as f64
    }

    /// Rounds every component to the working precision.
    pub fn rounded(&self, pc: &PrecisionConfig) -> Self {
        let r = |v: &[f64]| v.iter().map(|&x| pc.round(x)).collect();
        Self {
            z: r(&self.z),
            lambda: r(&self.lambda),
            s: r(&self.s),
        }
    }
}

impl<T: Copy + PartialOrd> Iterate<T> {
    pub fn is_strictly_interior(&self, zero: T) -> bool {
        self.lambda.iter().chain(&self.s).all(|&x| x > zero)
    }
}

impl Iterate<f64> {
    pub fn lift<A: Arith>(&self, ar: &A) -> Iterate<A::Real> {
        let l = |v: &[f64]| v.iter().map(|&x| ar.lit(x)).collect();
        Iterate {
            z: l(&self.z),
            lambda: l(&self.lambda),
            s: l(&self.s),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl Residuals {
    pub fn r_f_norm(&self) -> f64 {
        norm2(&self.r_f)
    }

    pub fn r_g_norm(&self) -> f64 {
        norm2(&self.r_g)
    }
}

impl NlpProblem {
    pub const ALL: [NlpProblem; 4] = [
        NlpProblem::TwoCircles,
        NlpProblem::TwoCirclesModified,
        NlpProblem::ScalarQuadratic,
        NlpProblem::ThreeCircles,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            NlpProblem::TwoCircles => "two-circles",
            NlpProblem::TwoCirclesModified => "two-circles-mod",
            NlpProblem::ScalarQuadratic => "scalar-quadratic",
            NlpProblem::ThreeCircles => "three-circles",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.key() == key)
    }

    pub fn n(&self) -> usize {
        match self {
            NlpProblem::ScalarQuadratic => 1,
            _ => 2,
        }
    }

    pub fn m(&self) -> usize {
        match self {
            NlpProblem::ScalarQuadratic => 1,
            NlpProblem::ThreeCircles => 3,
            _ => 2,
        }
    }

    pub fn eval_phi<A: Arith>(&self, ar: &A, z: &[A::Real]) -> A::Real {
        match self {
            NlpProblem::ScalarQuadratic => ar.mul(ar.lit(0.5), ar.square(z[0])),
            _ => z[0],
        }
    }

    pub fn eval_grad_phi<A: Arith>(&self, ar: &A, z: &[A::Real]) -> Vec<A::Real> {
        match self {
            NlpProblem::ScalarQuadratic => vec![z[0]],
            _ => vec![ar.one(), ar.zero()],
        }
    }

    pub fn eval_hess_phi<A: Arith>(&self, ar: &A, _z: &[A::Real]) -> DMatrix<A::Real> {
        match self {
            NlpProblem::ScalarQuadratic => DMatrix::from_element(1, 1, ar.one()),
            _ => DMatrix::from_element(2, 2, ar.zero()),
        }
    }

    pub fn eval_g<A: Arith>(&self, ar: &A, z: &[A::Real]) -> Vec<A::Real> {
        match self {
            NlpProblem::ScalarQuadratic => vec![ar.neg(z[0])],
            NlpProblem::TwoCircles => vec![circle1(ar, z), circle2(ar, z)],
            NlpProblem::TwoCirclesModified => vec![circle1(ar, z), ellipse2(ar, z)],
            NlpProblem::ThreeCircles => vec![circle1(ar, z), circle2(ar, z), circle3(ar, z)],
        }
    }

    /// n x m matrix whose column `i` is `grad g_i(z)`.
    pub fn eval_jac_g<A: Arith>(&self, ar: &A, z: &[A::Real]) -> DMatrix<A::Real> {
        let two = ar.lit(2.0);
        let col_circle = |c: A::Real| [ar.mul(two, ar.sub(z[0], c)), ar.mul(two, z[1])];
        let cols: Vec<[A::Real; 2]> = match self {
            NlpProblem::ScalarQuadratic => {
                return DMatrix::from_element(1, 1, ar.neg(ar.one()));
            }
            NlpProblem::TwoCircles => vec![
                col_circle(ar.frac(1.0, 3.0)),
                col_circle(ar.frac(2.0, 3.0)),
            ],
            NlpProblem::TwoCirclesModified => {
                let s5 = ar.sqrt(ar.lit(5.0));
                let k = ar.div(ar.lit(4.0), ar.mul(ar.lit(3.0), s5));
                vec![
                    col_circle(ar.frac(1.0, 3.0)),
                    [ar.mul(k, ar.sub(z[0], s5)), ar.mul(two, z[1])],
                ]
            }
            NlpProblem::ThreeCircles => vec![
                col_circle(ar.frac(1.0, 3.0)),
                col_circle(ar.frac(2.0, 3.0)),
                [ar.mul(two, ar.add(z[0], ar.one())), ar.mul(two, ar.sub(z[1], ar.one()))],
            ],
        };
        DMatrix::from_fn(2, cols.len(), |r, c| cols[c][r])
    }

    pub fn eval_hess_g<A: Arith>(&self, ar: &A, _z: &[A::Real], i: usize) -> DMatrix<A::Real> {
        assert!(i < self.m(), "constraint index {i} out of range");
        let diag = |a: A::Real, b: A::Real| {
            let mut h = DMatrix::from_element(2, 2, ar.zero());
            h[(0, 0)] = a;
            h[(1, 1)] = b;
            h
        };
        let two = ar.lit(2.0);
        match (self, i) {
            (NlpProblem::ScalarQuadratic, _) => DMatrix::from_element(1, 1, ar.zero()),
            (NlpProblem::TwoCirclesModified, 1) => {
                let s5 = ar.sqrt(ar.lit(5.0));
                diag(ar.div(ar.lit(4.0), ar.mul(ar.lit(3.0), s5)), two)
            }
            _ => diag(two, two),
        }
    }

    pub fn strictly_complementary(&self) -> bool {
        !matches!(self, NlpProblem::ScalarQuadratic)
    }

    pub fn known_solution(&self) -> KnownSolution {
        let (z_star, active, inactive, a, b) = match self {
            NlpProblem::ScalarQuadratic => (vec![0.0], vec![0], vec![], vec![1.0], 0.0),
            NlpProblem::ThreeCircles => (vec![0.0, 0.0], vec![0, 1], vec![2], vec![2.0, 4.0], 3.0),
            _ => (vec![0.0, 0.0], vec![0, 1], vec![], vec![2.0, 4.0], 3.0),
        };
        let jac = self.eval_jac_g(&PrecisionConfig::native(), &z_star);
        let jac_b = jac.select_columns(active.iter());
        let svd = svd_basis(&jac_b);
        KnownSolution {
            z_star,
            active,
            inactive,
            multiplier_affine: MultiplierSegment { a, b },
            svd,
            strictly_complementary: self.strictly_complementary(),
        }
    }

    /// Starting point used by the reference experiments.
    pub fn default_start(&self) -> Iterate {
        match self {
            NlpProblem::ScalarQuadratic => Iterate::new(vec![0.1], vec![0.1], vec![0.1]),
            NlpProblem::ThreeCircles => Iterate::new(
                vec![1.0 / 30.0, 1.0 / 9.0],
                vec![1.0, 1.0 / 5.0, 1.0 / 20.0],
                vec![1.0 / 10.0, 1.0 / 2.0, 2.0],
            ),
            _ => Iterate::new(
                vec![1.0 / 30.0, 1.0 / 9.0],
                vec![1.0, 1.0 / 5.0],
                vec![1.0 / 10.0, 1.0 / 2.0],
            ),
        }
    }
}

fn circle<A: Arith>(ar: &A, z: &[A::Real], c: A::Real, r2: A::Real) -> A::Real {
    ar.sub(ar.add(ar.square(ar.sub(z[0], c)), ar.square(z[1])), r2)
}

fn circle1<A: Arith>(ar: &A, z: &[A::Real]) -> A::Real {
    circle(ar, z, ar.frac(1.0, 3.0), ar.frac(1.0, 9.0))
}

fn circle2<A: Arith>(ar: &A, z: &[A::Real]) -> A::Real {
    circle(ar, z, ar.frac(2.0, 3.0), ar.frac(4.0, 9.0))
}

/// `(2/(3 sqrt5)) (z1 - sqrt5)^2 + z2^2 - 2 sqrt5 / 3`.
fn ellipse2<A: Arith>(ar: &A, z: &[A::Real]) -> A::Real {
    let s5 = ar.sqrt(ar.lit(5.0));
    let k = ar.div(ar.lit(2.0), ar.mul(ar.lit(3.0), s5));
    let r = ar.div(ar.mul(ar.lit(2.0), s5), ar.lit(3.0));
    let first = ar.mul(k, ar.square(ar.sub(z[0], s5)));
    ar.sub(ar.add(first, ar.square(z[1])), r)
}

/// `(z1 + 1)^2 + (z2 - 1)^2 - 4`; inactive at the origin.
fn circle3<A: Arith>(ar: &A, z: &[A::Real]) -> A::Real {
    let a = ar.square(ar.add(z[0], ar.one()));
    let b = ar.square(ar.sub(z[1], ar.one()));
    ar.sub(ar.add(a, b), ar.lit(4.0))
}

/// Columns of `right` are sign-normalized so their largest entry is positive;
/// `left` columns follow to keep the factorization intact.
fn svd_basis(jac_b: &DMatrix<f64>) -> SvdBasis {
    let svd = svd_small(jac_b).expect("Jacobi SVD converges on 2x2 inputs");
    let (n, nb) = jac_b.shape();
    let mut left = svd.left.clone();
    let mut right = svd.right.clone();
    for c in 0..nb {
        let col = right.column(c);
        let imax = col.iamax();
        if col[imax] < 0.0 {
            right.column_mut(c).neg_mut();
            if c < svd.rank {
                left.column_mut(c).neg_mut();
            }
        }
    }
    let r = svd.rank;
    SvdBasis {
        u_hat: left.columns(0, r).into_owned(),
        v_hat: left.columns(r, n - r).into_owned(),
        u: right.columns(0, r).into_owned(),
        v: right.columns(r, nb - r).into_owned(),
        sigma: svd.singular_values[..r].to_vec(),
    }
}

impl KnownSolution {
    /// A perfectly centered point at the solution: `z = z*`, the given
    /// active multipliers, `s_B = mu / lambda_B`, `s_N = -g_N(z*)` and
    /// `lambda_N = mu / s_N`.
    pub fn central_iterate(&self, problem: NlpProblem, lambda_b: &[f64], mu: f64) -> Iterate {
        let m = problem.m();
        let g = problem.eval_g(&PrecisionConfig::native(), &self.z_star);
        let mut lambda = vec![0.0; m];
        let mut s = vec![0.0; m];
        for (k, &i) in self.active.iter().enumerate() {
            lambda[i] = lambda_b[k];
            s[i] = mu / lambda_b[k];
        }
        for &i in &self.inactive {
            s[i] = -g[i];
            lambda[i] = mu / s[i];
        }
        Iterate::new(self.z_star.clone(), lambda, s)
    }

    /// Active-set components of a multiplier vector.
    pub fn lambda_b(&self, lambda: &[f64]) -> Vec<f64> {
        self.active.iter().map(|&i| lambda[i]).collect()
    }

    pub fn lambda_n(&self, lambda: &[f64]) -> Vec<f64> {
        self.inactive.iter().map(|&i| lambda[i]).collect()
    }
}

pub fn make_two_circles() -> (NlpProblem, KnownSolution) {
    let p = NlpProblem::TwoCircles;
    (p, p.known_solution())
}

pub fn make_two_circles_modified() -> (NlpProblem, KnownSolution) {
    let p = NlpProblem::TwoCirclesModified;
    (p, p.known_solution())
}

pub fn make_scalar_quadratic() -> (NlpProblem, KnownSolution) {
    let p = NlpProblem::ScalarQuadratic;
    (p, p.known_solution())
}

pub fn make_three_circles() -> (NlpProblem, KnownSolution) {
    let p = NlpProblem::ThreeCircles;
    (p, p.known_solution())
}

/// `grad phi + sum_i lambda_i grad g_i`, accumulated with `i` ascending.
pub(crate) fn lagrangian_gradient<A: Arith>(
    ar: &A,
    grad_phi: &[A::Real],
    jac: &DMatrix<A::Real>,
    lambda: &[A::Real],
) -> Vec<A::Real> {
    (0..grad_phi.len())
        .map(|a| {
            let mut acc = grad_phi[a];
            for (i, &l) in lambda.iter().enumerate() {
                acc = ar.add(acc, ar.mul(jac[(a, i)], l));
            }
            acc
        })
        .collect()
}

/// Residuals in native double precision.
pub fn eval_residuals(problem: NlpProblem, it: &Iterate) -> Result<Residuals> {
    eval_residuals_with(problem, it, &PrecisionConfig::native())
}

pub fn eval_residuals_with(
    problem: NlpProblem,
    it: &Iterate,
    pc: &PrecisionConfig,
) -> Result<Residuals> {
    check_dimensions(problem, it)?;
    if !it.is_strictly_interior(0.0) {
        return Err(Error::NotInterior(format!(
            "lambda = {:?}, s = {:?}",
            it.lambda, it.s
        )));
    }
    let grad = problem.eval_grad_phi(pc, &it.z);
    let jac = problem.eval_jac_g(pc, &it.z);
    let r_f = lagrangian_gradient(pc, &grad, &jac, &it.lambda);
    let g = problem.eval_g(pc, &it.z);
    let r_g = g.iter().zip(&it.s).map(|(&gi, &si)| pc.add(gi, si)).collect();
    Ok(Residuals {
        r_f,
        r_g,
        mu: duality_measure(pc, &it.lambda, &it.s),
    })
}

/// `lambda^T s / m`, summed with `i` ascending.
pub(crate) fn duality_measure<A: Arith>(ar: &A, lambda: &[A::Real], s: &[A::Real]) -> A::Real {
    let mut acc = ar.mul(lambda[0], s[0]);
    for i in 1..lambda.len() {
        acc = ar.add(acc, ar.mul(lambda[i], s[i]));
    }
    ar.div(acc, ar.lit(lambda.len() as f64))
}

pub(crate) fn check_dimensions<T>(problem: NlpProblem, it: &Iterate<T>) -> Result<()> {
    let (n, m) = (problem.n(), problem.m());
    if it.z.len() != n || it.lambda.len() != m || it.s.len() != m {
        return Err(Error::Dimension(format!(
            "{} expects n = {n}, m = {m}; got |z| = {}, |lambda| = {}, |s| = {}",
            problem.key(),
            it.z.len(),
            it.lambda.len(),
            it.s.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const PC: PrecisionConfig = PrecisionConfig::native();

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn two_circles_at_origin() {
        let (p, _) = make_two_circles();
        assert_eq!(p.eval_g(&PC, &[0.0, 0.0]), vec![0.0, 0.0]);
        let j = p.eval_jac_g(&PC, &[0.0, 0.0]);
        assert!(close(j[(0, 0)], -2.0 / 3.0, 1e-16) && j[(1, 0)] == 0.0);
        assert!(close(j[(0, 1)], -4.0 / 3.0, 1e-16) && j[(1, 1)] == 0.0);
        assert_eq!(p.eval_phi(&PC, &[1.0 / 30.0, 1.0 / 9.0]), 1.0 / 30.0);
    }

    #[test]
    fn modified_problem_keeps_solution() {
        let (p, k) = make_two_circles_modified();
        let g = p.eval_g(&PC, &[0.0, 0.0]);
        assert!(g[1].abs() < 1e-15);
        let j = p.eval_jac_g(&PC, &[0.0, 0.0]);
        assert!(close(j[(0, 1)], -4.0 / 3.0, 1e-15));
        let z0 = [1.0 / 30.0, 1.0 / 9.0];
        let orig = NlpProblem::TwoCircles.eval_g(&PC, &z0);
        assert_eq!(p.eval_g(&PC, &z0)[0], orig[0]);
        let orig = NlpProblem::TwoCircles.known_solution();
        assert_eq!((&k.z_star, &k.active, &k.multiplier_affine), (&orig.z_star, &orig.active, &orig.multiplier_affine));
        assert!((&k.svd.v - &orig.svd.v).amax() < 1e-15);
    }

    #[test]
    fn scalar_quadratic_saturating_point() {
        let (p, _) = make_scalar_quadratic();
        let eps = 1e-3;
        let it = Iterate::new(vec![eps], vec![eps], vec![eps]);
        let r = eval_residuals(p, &it).unwrap();
        assert_eq!(r.mu, eps * eps);
        assert_eq!(r.r_f, vec![0.0]);
        assert_eq!(r.r_g, vec![0.0]);
    }

    #[test]
    fn residuals_at_standard_start() {
        let p = NlpProblem::TwoCircles;
        let r = eval_residuals(p, &p.default_start()).unwrap();
        assert!(close(r.mu, 0.1, 1e-16));
        assert_eq!((r.mu.log10() * 10.0).round() / 10.0, -1.0);
    }

    #[test]
    fn non_interior_rejected() {
        let p = NlpProblem::TwoCircles;
        let it = Iterate::new(vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]);
        assert!(matches!(eval_residuals(p, &it), Err(Error::NotInterior(_))));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let it = Iterate::new(vec![0.0], vec![1.0], vec![1.0]);
        assert!(matches!(
            eval_residuals(NlpProblem::TwoCircles, &it),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn keys_round_trip() {
        for p in NlpProblem::ALL {
            assert_eq!(NlpProblem::from_key(p.key()), Some(p));
        }
        assert_eq!(NlpProblem::from_key("nope"), None);
    }

    #[test]
    fn known_solutions_are_consistent() {
        for p in NlpProblem::ALL {
            let k = p.known_solution();
            let g = p.eval_g(&PC, &k.z_star);
            for &i in &k.active {
                assert!(g[i].abs() <= 1e-12, "{p:?} g_{i} = {}", g[i]);
            }
            for &i in &k.inactive {
                assert!(g[i] < -1e-12);
            }
            // Both endpoints of the segment are KKT multipliers.
            let a = &k.multiplier_affine.a;
            let b = k.multiplier_affine.b;
            let vertices: Vec<Vec<f64>> = (0..a.len())
                .map(|j| {
                    let mut l = vec![0.0; a.len()];
                    l[j] = b / a[j];
                    l
                })
                .collect();
            for lb in vertices {
                let mut lambda = vec![0.0; p.m()];
                for (kk, &i) in k.active.iter().enumerate() {
                    lambda[i] = lb[kk];
                }
                let grad = p.eval_grad_phi(&PC, &k.z_star);
                let jac = p.eval_jac_g(&PC, &k.z_star);
                let rf = lagrangian_gradient(&PC, &grad, &jac, &lambda);
                assert!(rf.iter().all(|x| x.abs() <= 1e-10), "{p:?} {rf:?}");
            }
        }
    }

    #[test]
    fn svd_basis_invariants() {
        for p in NlpProblem::ALL {
            let k = p.known_solution();
            let jac = p.eval_jac_g(&PC, &k.z_star).select_columns(k.active.iter());
            let b = &k.svd;
            let sigma = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(b.sigma.clone()));
            let rebuilt = &b.u_hat * sigma * b.u.transpose();
            assert!((rebuilt - &jac).amax() <= 1e-12);
            assert!((&jac * &b.v).amax() <= 1e-12);
            let left = DMatrix::from_columns(
                &b.u_hat.column_iter().chain(b.v_hat.column_iter()).map(|c| c.into_owned()).collect::<Vec<_>>(),
            );
            let right = DMatrix::from_columns(
                &b.u.column_iter().chain(b.v.column_iter()).map(|c| c.into_owned()).collect::<Vec<_>>(),
            );
            for q in [left, right] {
                let e = q.transpose() * &q - DMatrix::identity(q.ncols(), q.ncols());
                assert!(e.amax() <= 1e-12);
            }
        }
    }

    #[test]
    fn two_circles_svd_directions() {
        let k = NlpProblem::TwoCircles.known_solution();
        let s5 = 5f64.sqrt();
        assert!(close(k.svd.sigma[0], 2.0 * s5 / 3.0, 1e-14));
        assert!(close(k.svd.u[(0, 0)], 1.0 / s5, 1e-12) && close(k.svd.u[(1, 0)], 2.0 / s5, 1e-12));
        assert!(close(k.svd.v[(0, 0)], 2.0 / s5, 1e-12) && close(k.svd.v[(1, 0)], -1.0 / s5, 1e-12));
    }

    #[test]
    fn central_iterate_is_centered() {
        let (p, k) = make_three_circles();
        let it = k.central_iterate(p, &[1.0, 0.25], 1e-6);
        let r = eval_residuals(p, &it).unwrap();
        assert!(close(r.mu, 1e-6, 1e-20));
        for i in 0..3 {
            assert!(close(it.lambda[i] * it.s[i], 1e-6, 1e-20));
        }
        // z = z*, so r_g = s on the active set and zero on the inactive one.
        assert_eq!(r.r_g[2], 0.0);
        assert_eq!(r.r_g[..2], it.s[..2]);
    }

    #[test]
    fn hessians_symmetric() {
        for p in NlpProblem::ALL {
            let z = vec![0.3; p.n()];
            let mut hs = vec![p.eval_hess_phi(&PC, &z)];
            hs.extend((0..p.m()).map(|i| p.eval_hess_g(&PC, &z, i)));
            for h in hs {
                assert!((&h - h.transpose()).amax() <= 1e-14);
            }
        }
    }

    #[test]
    fn evaluators_are_deterministic() {
        for p in NlpProblem::ALL {
            let z = vec![0.123_456_789; p.n()];
            assert_eq!(p.eval_g(&PC, &z), p.eval_g(&PC, &z));
            assert_eq!(p.eval_jac_g(&PC, &z), p.eval_jac_g(&PC, &z));
        }
    }
}
