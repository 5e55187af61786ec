//! Step equations in full, augmented and condensed form.
//!
//! With `D = Lambda^{-1} S`, `t` the perturbation of the complementarity
//! equations and `J` the n x m constraint Jacobian:
//!
//! * full: `[[Lzz, J, 0], [J^T, 0, I], [0, S, Lambda]] (dz, dl, ds) = -(L_z, g + s, S Lambda e + t)`;
//! * augmented: `[[Lzz, J], [J^T, -D]] (dz, dl) = (-L_z, -g + Lambda^{-1} t)`;
//! * condensed: `(Lzz + J D^{-1} J^T) dz = -L_z - J D^{-1} (g - Lambda^{-1} t)`.
//!
//! The augmented and condensed forms recover `dl` and `ds` afterwards.
//! All arithmetic goes through an [`Arith`] implementation, and the
//! accumulation orders below are fixed so results are reproducible bit for bit.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    bunch_kaufman, bunch_parlett, cholesky, cholesky_solve, gepp_solve, solve_ldlt, GeppLog,
    GrowthSample, PivotRecord,
};
use crate::precision::Arith;
use crate::problems::{check_dimensions, duality_measure, lagrangian_gradient, Iterate, KnownSolution, NlpProblem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule", content = "sigma")]
pub enum TRule {
    /// `t = mu^2 e`.
    MuSquared,
    /// `t = -sigma mu e`, i.e. Newton toward `lambda_i s_i = sigma mu`.
    Centering(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    Full,
    Augmented,
    Condensed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Cholesky,
    BunchKaufman,
    BunchParlett,
    Gepp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub t_rule: TRule,
    pub formulation: Formulation,
    pub solver: SolverKind,
}

impl Formulation {
    pub const ALL: [Formulation; 3] = [Formulation::Full, Formulation::Augmented, Formulation::Condensed];

    pub fn key(&self) -> &'static str {
        match self {
            Formulation::Full => "full",
            Formulation::Augmented => "augmented",
            Formulation::Condensed => "condensed",
        }
    }

    pub fn default_solver(&self) -> SolverKind {
        match self {
            Formulation::Condensed => SolverKind::Cholesky,
            Formulation::Augmented => SolverKind::BunchKaufman,
            Formulation::Full => SolverKind::Gepp,
        }
    }
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [
        SolverKind::Cholesky,
        SolverKind::BunchKaufman,
        SolverKind::BunchParlett,
        SolverKind::Gepp,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            SolverKind::Cholesky => "cholesky",
            SolverKind::BunchKaufman => "bunch-kaufman",
            SolverKind::BunchParlett => "bunch-parlett",
            SolverKind::Gepp => "gepp",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.key() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown formulation '{s}'")))
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.key() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown solver '{s}'")))
    }
}

impl StepConfig {
    /// `t = mu^2 e` with the default solver of `formulation`.
    pub fn new(formulation: Formulation) -> Self {
        Self {
            t_rule: TRule::MuSquared,
            formulation,
            solver: formulation.default_solver(),
        }
    }

    pub fn with_solver(mut self, solver: SolverKind) -> Self {
        self.solver = solver;
        self
    }

    pub fn with_t_rule(mut self, t_rule: TRule) -> Self {
        self.t_rule = t_rule;
        self
    }

    /// Cholesky needs a definite matrix, so it only serves the condensed
    /// form; the unsymmetric full matrix needs GEPP.
    pub fn validate(&self) -> Result<()> {
        if let TRule::Centering(sigma) = self.t_rule {
            if !(0.0..=1.0).contains(&sigma) {
                return Err(Error::InvalidConfig(format!("sigma = {sigma} outside [0, 1]")));
            }
        }
        let ok = match self.formulation {
            Formulation::Condensed => true,
            Formulation::Augmented => self.solver != SolverKind::Cholesky,
            Formulation::Full => self.solver == SolverKind::Gepp,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "solver {} cannot be used with the {} formulation",
                self.solver, self.formulation
            )))
        }
    }
}

/// Problem functions evaluated at one iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<T> {
    pub g: Vec<T>,
    /// n x m.
    pub jac: DMatrix<T>,
    pub lz: Vec<T>,
    pub lzz: DMatrix<T>,
}

/// Active/inactive split attached for diagnostics; solvers ignore it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub active: Vec<usize>,
    pub inactive: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSystem<T = f64> {
    pub formulation: Formulation,
    pub matrix: DMatrix<T>,
    pub rhs: Vec<T>,
    /// `s_i / lambda_i`.
    pub d: Vec<T>,
    /// `lambda_i / s_i`.
    pub d_inv: Vec<T>,
    pub t: Vec<T>,
    pub mu: T,
    pub eval: Evaluation<T>,
    pub partition: Option<Partition>,
}

impl<T> AssembledSystem<T> {
    pub fn with_partition(mut self, known: &KnownSolution) -> Self {
        self.partition = Some(Partition {
            active: known.active.clone(),
            inactive: known.inactive.clone(),
        });
        self
    }

    pub fn dimension(&self) -> usize {
        self.rhs.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step<T = f64> {
    pub dz: Vec<T>,
    pub dlambda: Vec<T>,
    pub ds: Vec<T>,
}

impl Step<f64> {
    /// Euclidean norm of the stacked vector `(dz, dlambda, ds)`.
    pub fn norm(&self) -> f64 {
        self.dz
            .iter()
            .chain(&self.dlambda)
            .chain(&self.ds)
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }
}

impl<T: Copy> Step<T> {
    pub fn map<U>(&self, f: impl Fn(T) -> U) -> Step<U> {
        Step {
            dz: self.dz.iter().map(|&x| f(x)).collect(),
            dlambda: self.dlambda.iter().map(|&x| f(x)).collect(),
            ds: self.ds.iter().map(|&x| f(x)).collect(),
        }
    }
}

/// What the linear solver reported about its factorization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "solver")]
pub enum FactorLog {
    Cholesky,
    Ldlt {
        pivots: Vec<PivotRecord>,
        growth: Vec<GrowthSample>,
    },
    Gepp(GeppLog),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<T = f64> {
    pub step: Step<T>,
    pub system: AssembledSystem<T>,
    pub factor: FactorLog,
}

fn evaluate<A: Arith>(problem: NlpProblem, it: &Iterate<A::Real>, ar: &A) -> Evaluation<A::Real> {
    let z = &it.z;
    let g = problem.eval_g(ar, z);
    let jac = problem.eval_jac_g(ar, z);
    let grad = problem.eval_grad_phi(ar, z);
    let lz = lagrangian_gradient(ar, &grad, &jac, &it.lambda);
    let mut lzz = problem.eval_hess_phi(ar, z);
    for (i, &l) in it.lambda.iter().enumerate() {
        let h = problem.eval_hess_g(ar, z, i);
        for (dst, &hv) in lzz.iter_mut().zip(h.iter()) {
            *dst = ar.add(*dst, ar.mul(l, hv));
        }
    }
    Evaluation { g, jac, lz, lzz }
}

fn t_vector<A: Arith>(rule: TRule, mu: A::Real, m: usize, ar: &A) -> Vec<A::Real> {
    let t = match rule {
        TRule::MuSquared => ar.mul(mu, mu),
        TRule::Centering(sigma) => ar.neg(ar.mul(ar.lit(sigma), mu)),
    };
    vec![t; m]
}

pub fn assemble<A: Arith>(
    problem: NlpProblem,
    it: &Iterate<A::Real>,
    cfg: &StepConfig,
    ar: &A,
) -> Result<AssembledSystem<A::Real>> {
    check_dimensions(problem, it)?;
    if !it.is_strictly_interior(ar.zero()) {
        return Err(Error::NotInterior(format!(
            "lambda = {:?}, s = {:?}",
            it.lambda, it.s
        )));
    }
    let (n, m) = (problem.n(), problem.m());
    let eval = evaluate(problem, it, ar);
    let mu = duality_measure(ar, &it.lambda, &it.s);
    let t = t_vector(cfg.t_rule, mu, m, ar);
    let d: Vec<_> = (0..m).map(|i| ar.div(it.s[i], it.lambda[i])).collect();
    let d_inv: Vec<_> = (0..m).map(|i| ar.div(it.lambda[i], it.s[i])).collect();
    let jac = &eval.jac;

    let (matrix, rhs) = match cfg.formulation {
        Formulation::Condensed => {
            let mut mat = eval.lzz.clone();
            for i in 0..m {
                for a in 0..n {
                    let jd = ar.mul(jac[(a, i)], d_inv[i]);
                    for b in 0..n {
                        mat[(a, b)] = ar.add(mat[(a, b)], ar.mul(jd, jac[(b, i)]));
                    }
                }
            }
            let w: Vec<_> = (0..m)
                .map(|i| ar.sub(eval.g[i], ar.div(t[i], it.lambda[i])))
                .collect();
            let rhs = (0..n)
                .map(|a| {
                    let mut acc = ar.zero();
                    for i in 0..m {
                        acc = ar.add(acc, ar.mul(ar.mul(jac[(a, i)], d_inv[i]), w[i]));
                    }
                    ar.sub(ar.neg(eval.lz[a]), acc)
                })
                .collect();
            (mat, rhs)
        }
        Formulation::Augmented => {
            let mut mat = DMatrix::from_element(n + m, n + m, ar.zero());
            mat.view_mut((0, 0), (n, n)).copy_from(&eval.lzz);
            for i in 0..m {
                for a in 0..n {
                    mat[(a, n + i)] = jac[(a, i)];
                    mat[(n + i, a)] = jac[(a, i)];
                }
                mat[(n + i, n + i)] = ar.neg(d[i]);
            }
            let mut rhs: Vec<_> = eval.lz.iter().map(|&x| ar.neg(x)).collect();
            rhs.extend((0..m).map(|i| ar.add(ar.neg(eval.g[i]), ar.div(t[i], it.lambda[i]))));
            (mat, rhs)
        }
        Formulation::Full => {
            let dim = n + 2 * m;
            let mut mat = DMatrix::from_element(dim, dim, ar.zero());
            mat.view_mut((0, 0), (n, n)).copy_from(&eval.lzz);
            for i in 0..m {
                for a in 0..n {
                    mat[(a, n + i)] = jac[(a, i)];
                    mat[(n + i, a)] = jac[(a, i)];
                }
                mat[(n + i, n + m + i)] = ar.one();
                mat[(n + m + i, n + i)] = it.s[i];
                mat[(n + m + i, n + m + i)] = it.lambda[i];
            }
            let mut rhs: Vec<_> = eval.lz.iter().map(|&x| ar.neg(x)).collect();
            rhs.extend((0..m).map(|i| ar.neg(ar.add(eval.g[i], it.s[i]))));
            rhs.extend(
                (0..m).map(|i| ar.neg(ar.add(ar.mul(it.s[i], it.lambda[i]), t[i]))),
            );
            (mat, rhs)
        }
    };

    Ok(AssembledSystem {
        formulation: cfg.formulation,
        matrix,
        rhs,
        d,
        d_inv,
        t,
        mu,
        eval,
        partition: None,
    })
}

fn solve_symmetric<A: Arith>(
    sys: &AssembledSystem<A::Real>,
    solver: SolverKind,
    ar: &A,
) -> Result<(Vec<A::Real>, FactorLog)> {
    match solver {
        SolverKind::Cholesky => {
            let f = cholesky(&sys.matrix, ar)?;
            Ok((cholesky_solve(&f, &sys.rhs, ar), FactorLog::Cholesky))
        }
        SolverKind::BunchKaufman | SolverKind::BunchParlett => {
            let f = if solver == SolverKind::BunchKaufman {
                bunch_kaufman(&sys.matrix, ar)?
            } else {
                bunch_parlett(&sys.matrix, ar)?
            };
            let x = solve_ldlt(&f, &sys.rhs, ar)?;
            Ok((
                x,
                FactorLog::Ldlt {
                    pivots: f.pivot_log,
                    growth: f.growth,
                },
            ))
        }
        SolverKind::Gepp => {
            let sol = gepp_solve(&sys.matrix, &sys.rhs, ar)?;
            let log = sol.log();
            Ok((sol.x, FactorLog::Gepp(log)))
        }
    }
}

/// `-(g_i + s_i) - (J^T dz)_i`.
fn recover_ds<A: Arith>(
    ar: &A,
    it: &Iterate<A::Real>,
    eval: &Evaluation<A::Real>,
    dz: &[A::Real],
) -> Vec<A::Real> {
    (0..it.s.len())
        .map(|i| {
            let mut jtdz = ar.mul(eval.jac[(0, i)], dz[0]);
            for (a, &dza) in dz.iter().enumerate().skip(1) {
                jtdz = ar.add(jtdz, ar.mul(eval.jac[(a, i)], dza));
            }
            ar.sub(ar.neg(ar.add(eval.g[i], it.s[i])), jtdz)
        })
        .collect()
}

fn ensure_finite<A: Arith>(ar: &A, step: &Step<A::Real>, what: &str) -> Result<()> {
    let ok = step
        .dz
        .iter()
        .chain(&step.dlambda)
        .chain(&step.ds)
        .all(|&x| ar.is_finite(x));
    if ok {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Solves the condensed system for `dz`, then
/// `dl_i = (lambda_i / s_i) (g_i - t_i / lambda_i + (J^T dz)_i)` and
/// `ds = -(g + s) - J^T dz`.
pub fn procedure_condensed<A: Arith>(
    problem: NlpProblem,
    it: &Iterate<A::Real>,
    t_rule: TRule,
    solver: SolverKind,
    ar: &A,
) -> Result<StepOutcome<A::Real>> {
    let cfg = StepConfig {
        t_rule,
        formulation: Formulation::Condensed,
        solver,
    };
    cfg.validate()?;
    let system = assemble(problem, it, &cfg, ar)?;
    let (dz, factor) = solve_symmetric(&system, solver, ar)?;
    let eval = &system.eval;
    let dlambda = (0..problem.m())
        .map(|i| {
            let mut acc = ar.sub(eval.g[i], ar.div(system.t[i], it.lambda[i]));
            for (a, &dza) in dz.iter().enumerate() {
                acc = ar.add(acc, ar.mul(eval.jac[(a, i)], dza));
            }
            ar.mul(system.d_inv[i], acc)
        })
        .collect();
    let ds = recover_ds(ar, it, eval, &dz);
    let step = Step { dz, dlambda, ds };
    ensure_finite(ar, &step, "condensed step")?;
    Ok(StepOutcome { step, system, factor })
}

/// One solve of the augmented system for `(dz, dl)`, then `ds` as in the
/// condensed procedure.
pub fn procedure_augmented<A: Arith>(
    problem: NlpProblem,
    it: &Iterate<A::Real>,
    t_rule: TRule,
    solver: SolverKind,
    ar: &A,
) -> Result<StepOutcome<A::Real>> {
    let cfg = StepConfig {
        t_rule,
        formulation: Formulation::Augmented,
        solver,
    };
    cfg.validate()?;
    let system = assemble(problem, it, &cfg, ar)?;
    let (mut x, factor) = solve_symmetric(&system, solver, ar)?;
    let dlambda = x.split_off(problem.n());
    let dz = x;
    let ds = recover_ds(ar, it, &system.eval, &dz);
    let step = Step { dz, dlambda, ds };
    ensure_finite(ar, &step, "augmented step")?;
    Ok(StepOutcome { step, system, factor })
}

/// One GEPP solve of the full `n + 2m` system.
pub fn procedure_full<A: Arith>(
    problem: NlpProblem,
    it: &Iterate<A::Real>,
    t_rule: TRule,
    ar: &A,
) -> Result<StepOutcome<A::Real>> {
    let cfg = StepConfig {
        t_rule,
        formulation: Formulation::Full,
        solver: SolverKind::Gepp,
    };
    let system = assemble(problem, it, &cfg, ar)?;
    let sol = gepp_solve(&system.matrix, &system.rhs, ar)?;
    let factor = FactorLog::Gepp(sol.log());
    let mut x = sol.x;
    let (n, m) = (problem.n(), problem.m());
    let ds = x.split_off(n + m);
    let dlambda = x.split_off(n);
    let step = Step { dz: x, dlambda, ds };
    ensure_finite(ar, &step, "full step")?;
    Ok(StepOutcome { step, system, factor })
}

/// Dispatches on `cfg.formulation`.
pub fn compute_step<A: Arith>(
    problem: NlpProblem,
    it: &Iterate<A::Real>,
    cfg: &StepConfig,
    ar: &A,
) -> Result<StepOutcome<A::Real>> {
    cfg.validate()?;
    match cfg.formulation {
        Formulation::Condensed => procedure_condensed(problem, it, cfg.t_rule, cfg.solver, ar),
        Formulation::Augmented => procedure_augmented(problem, it, cfg.t_rule, cfg.solver, ar),
        Formulation::Full => procedure_full(problem, it, cfg.t_rule, ar),
    }
}
