//! Local-phase iteration: step, maximum step to the boundary, damping,
//! centrality bookkeeping, termination.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{project_multiplier_step, ProjectionReport};
use crate::error::{Error, Result};
use crate::precision::{Arith, PrecisionConfig};
use crate::problems::{eval_residuals, norm2, Iterate, KnownSolution, NlpProblem, Residuals};
use crate::stepgen::{compute_step, FactorLog, Step, StepConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentralityParams {
    /// Bound on `||r_f|| / mu` and `||r_g|| / mu`.
    pub c: f64,
    /// Lower bound on `lambda_i s_i / mu`.
    pub gamma: f64,
    /// Relaxation used by the relaxed check, in `[0, 1/2]`.
    pub tau: f64,
}

impl Default for CentralityParams {
    fn default() -> Self {
        Self {
            c: 10.0,
            gamma: 0.1,
            tau: 0.25,
        }
    }
}

impl CentralityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) || !(self.gamma > 0.0 && self.gamma < 1.0) || !(0.0..=0.5).contains(&self.tau) {
            return Err(Error::InvalidConfig(format!(
                "centrality parameters need C > 0, gamma in (0,1), tau in [0,1/2]; got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentralityStatus {
    pub rf_ratio: f64,
    pub rg_ratio: f64,
    /// `min_i lambda_i s_i / mu`.
    pub pair_ratio: f64,
    pub rf_ok: bool,
    pub rg_ok: bool,
    pub pair_ok: bool,
    pub relaxed: bool,
}

impl CentralityStatus {
    pub fn all_ok(&self) -> bool {
        self.rf_ok && self.rg_ok && self.pair_ok
    }
}

/// Checks `||r_f|| <= C mu`, `||r_g|| <= C mu` and `lambda_i s_i >= gamma mu`.
/// The relaxed variant uses `C (1 + tau)` and `gamma (1 - tau)`.
pub fn check_centrality(
    res: &Residuals,
    it: &Iterate,
    p: &CentralityParams,
    relaxed: bool,
) -> CentralityStatus {
    let (c, gamma) = if relaxed {
        (p.c * (1.0 + p.tau), p.gamma * (1.0 - p.tau))
    } else {
        (p.c, p.gamma)
    };
    let mu = res.mu;
    let rf_ratio = norm2(&res.r_f) / mu;
    let rg_ratio = norm2(&res.r_g) / mu;
    let pair_ratio = it
        .lambda
        .iter()
        .zip(&it.s)
        .map(|(l, s)| l * s / mu)
        .fold(f64::INFINITY, f64::min);
    CentralityStatus {
        rf_ratio,
        rg_ratio,
        pair_ratio,
        rf_ok: rf_ratio <= c,
        rg_ok: rg_ratio <= c,
        pair_ok: pair_ratio >= gamma,
        relaxed,
    }
}

/// Largest `alpha <= 1` with `lambda + alpha dl >= 0` and `s + alpha ds >= 0`.
pub fn max_step(it: &Iterate, step: &Step) -> f64 {
    let mut alpha = 1.0f64;
    for (v, dv) in it
        .lambda
        .iter()
        .chain(&it.s)
        .zip(step.dlambda.iter().chain(&step.ds))
    {
        if *dv < 0.0 {
            alpha = alpha.min(-v / dv);
        }
    }
    alpha
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopCriteria {
    pub mu_min: f64,
    pub max_iters: usize,
    /// Fraction of the step to the boundary actually taken.
    pub step_fraction: f64,
}

impl StopCriteria {
    /// `mu_min = max(1e4 u, 1e-17)`, 12 iterations, fraction 0.99.
    pub fn for_precision(pc: &PrecisionConfig) -> Self {
        Self {
            mu_min: (1e4 * pc.unit_roundoff()).max(1e-17),
            max_iters: 12,
            step_fraction: 0.99,
        }
    }
}

impl Default for StopCriteria {
    fn default() -> Self {
        Self::for_precision(&PrecisionConfig::native())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason", content = "detail")]
pub enum Termination {
    MuBelowThreshold,
    MaxIterations,
    /// Cholesky breakdown or an exactly singular pivot: roundoff has
    /// overtaken the problem scale.
    PrecisionFloor(String),
    SolverFailure(String),
    /// The damped step left the interior (possible only for fractions >= 1).
    LostInteriority,
}

/// Quantities attached to a record when a step was computed from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub step: Step,
    pub alpha_max: f64,
    pub alpha_taken: f64,
    pub projection: Option<ProjectionReport>,
    pub factor: FactorLog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub iterate: Iterate,
    pub residuals: Residuals,
    pub centrality: CentralityStatus,
    pub centrality_relaxed: CentralityStatus,
    /// `None` for the terminal record.
    pub step: Option<StepInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub problem: NlpProblem,
    pub config: StepConfig,
    pub precision: PrecisionConfig,
    pub stop: StopCriteria,
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
}

impl IterationTrace {
    pub fn final_iterate(&self) -> Option<&Iterate> {
        self.records.last().map(|r| &r.iterate)
    }

    /// Records that carry a step.
    pub fn steps(&self) -> impl Iterator<Item = (&IterationRecord, &StepInfo)> {
        self.records.iter().filter_map(|r| r.step.as_ref().map(|s| (r, s)))
    }
}

/// Runs the iteration from `start`. Each record holds the iterate at the
/// start of its iteration; the last record has no step. Solver failures end
/// the run with a reason instead of an error.
pub fn run(
    problem: NlpProblem,
    known: Option<&KnownSolution>,
    start: &Iterate,
    cfg: &StepConfig,
    params: &CentralityParams,
    pc: &PrecisionConfig,
    stop: &StopCriteria,
) -> Result<IterationTrace> {
    cfg.validate()?;
    params.validate()?;
    if !(stop.step_fraction >= 0.0) {
        return Err(Error::InvalidConfig(format!("step fraction {}", stop.step_fraction)));
    }
    let mut it = start.rounded(pc);
    eval_residuals(problem, &it)?;

    let mut records = Vec::new();
    let record = |k: usize, it: &Iterate, step: Option<StepInfo>| -> Result<IterationRecord> {
        let residuals = eval_residuals(problem, it)?;
        Ok(IterationRecord {
            iter: k,
            iterate: it.clone(),
            centrality: check_centrality(&residuals, it, params, false),
            centrality_relaxed: check_centrality(&residuals, it, params, true),
            residuals,
            step,
        })
    };

    let mut k = 0;
    let termination = loop {
        let mu = eval_residuals(problem, &it)?.mu;
        if mu <= stop.mu_min {
            records.push(record(k, &it, None)?);
            break Termination::MuBelowThreshold;
        }
        if k >= stop.max_iters {
            records.push(record(k, &it, None)?);
            break Termination::MaxIterations;
        }
        let outcome = match compute_step(problem, &it, cfg, pc) {
            Ok(o) => o,
            Err(e @ (Error::Completion(_) | Error::SingularPivot { .. } | Error::SingularMatrix { .. })) => {
                records.push(record(k, &it, None)?);
                break Termination::PrecisionFloor(e.to_string());
            }
            Err(e) => {
                records.push(record(k, &it, None)?);
                break Termination::SolverFailure(e.to_string());
            }
        };
        let step = outcome.step;
        let alpha_max = max_step(&it, &step);
        let alpha = pc.mul(pc.lit(stop.step_fraction), alpha_max);
        let advance = |x: &[f64], dx: &[f64]| -> Vec<f64> {
            x.iter().zip(dx).map(|(&a, &b)| pc.add(a, pc.mul(alpha, b))).collect()
        };
        let next = Iterate::new(
            advance(&it.z, &step.dz),
            advance(&it.lambda, &step.dlambda),
            advance(&it.s, &step.ds),
        );
        let projection = known.map(|kn| project_multiplier_step(&step, kn));
        records.push(record(
            k,
            &it,
            Some(StepInfo {
                step,
                alpha_max,
                alpha_taken: alpha,
                projection,
                factor: outcome.factor,
            }),
        )?);
        if !next.is_strictly_interior(0.0) {
            break Termination::LostInteriority;
        }
        it = next;
        k += 1;
    };

    Ok(IterationTrace {
        problem,
        config: *cfg,
        precision: *pc,
        stop: *stop,
        records,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stepgen::Formulation;

    #[test]
    fn max_step_examples() {
        let it = Iterate::new(vec![0.0], vec![1.0], vec![1.0]);
        let step = Step {
            dz: vec![0.0],
            dlambda: vec![-2.0],
            ds: vec![1.0],
        };
        assert_eq!(max_step(&it, &step), 0.5);
        let step = Step {
            dz: vec![0.0],
            dlambda: vec![3.0],
            ds: vec![0.0],
        };
        assert_eq!(max_step(&it, &step), 1.0);
    }

    #[test]
    fn centered_point_passes_pair_condition() {
        let it = Iterate::new(vec![0.0], vec![2.0, 0.5], vec![0.5, 2.0]);
        let res = Residuals {
            r_f: vec![0.0],
            r_g: vec![0.0, 0.0],
            mu: 1.0,
        };
        let st = check_centrality(&res, &it, &CentralityParams { c: 1e-9, gamma: 0.999, tau: 0.0 }, false);
        assert!(st.all_ok());
        assert_eq!(st.pair_ratio, 1.0);
    }

    #[test]
    fn relaxed_scales_constants() {
        let it = Iterate::new(vec![0.0], vec![1.0, 1.0], vec![0.08, 1.92]);
        let res = Residuals {
            r_f: vec![11.0],
            r_g: vec![0.0, 0.0],
            mu: 1.0,
        };
        let p = CentralityParams::default();
        let strict = check_centrality(&res, &it, &p, false);
        let relaxed = check_centrality(&res, &it, &p, true);
        assert!(!strict.rf_ok && !strict.pair_ok);
        assert!(relaxed.rf_ok && relaxed.pair_ok);
    }

    #[test]
    fn default_stop_threshold() {
        let s = StopCriteria::default();
        assert!((s.mu_min - 1e4 * (-53f64).exp2()).abs() < 1e-25);
        let s = StopCriteria::for_precision(&PrecisionConfig::emulated(24).unwrap());
        assert!((s.mu_min - 1e4 * (-24f64).exp2()).abs() < 1e-18);
    }

    #[test]
    fn zero_fraction_keeps_iterate() {
        let p = NlpProblem::TwoCircles;
        let stop = StopCriteria {
            step_fraction: 0.0,
            max_iters: 3,
            ..StopCriteria::default()
        };
        let tr = run(
            p,
            None,
            &p.default_start(),
            &StepConfig::new(Formulation::Condensed),
            &CentralityParams::default(),
            &PrecisionConfig::native(),
            &stop,
        )
        .unwrap();
        assert_eq!(tr.termination, Termination::MaxIterations);
        assert_eq!(tr.records.len(), 4);
        let mu0 = tr.records[0].residuals.mu;
        assert!(tr.records.iter().all(|r| r.residuals.mu == mu0));
    }

    #[test]
    fn immediate_stop_gives_single_record() {
        let p = NlpProblem::TwoCircles;
        let stop = StopCriteria {
            mu_min: 1.0,
            ..StopCriteria::default()
        };
        let tr = run(
            p,
            None,
            &p.default_start(),
            &StepConfig::new(Formulation::Condensed),
            &CentralityParams::default(),
            &PrecisionConfig::native(),
            &stop,
        )
        .unwrap();
        assert_eq!(tr.records.len(), 1);
        assert!(tr.records[0].step.is_none());
        assert_eq!(tr.termination, Termination::MuBelowThreshold);
    }
}
