use nalgebra::DMatrix;
use twofloat::TwoFloat;

use crate::error::Result;
use crate::precision::{Arith, ExtendedArith};
use crate::problems::{Iterate, NlpProblem};
use crate::stepgen::{assemble, procedure_full, Formulation, Step, StepConfig, TRule};

/// The step at `it` computed from the full system in double-double
/// arithmetic and rounded back to double. Its error is far below the
/// roundoff of any working precision, so it serves as the exact step.
pub fn reference_step(problem: NlpProblem, it: &Iterate, t_rule: TRule) -> Result<Step> {
    let ar = ExtendedArith;
    let lifted = it.lift(&ar);
    let out = procedure_full(problem, &lifted, t_rule, &ar)?;
    Ok(out.step.map(|x| ar.to_f64(x)))
}

/// `||K x - r|| / ||r||` for the full system at `it`, evaluated in
/// double-double so the measurement adds no roundoff of its own.
pub fn step_residual(problem: NlpProblem, it: &Iterate, step: &Step, t_rule: TRule) -> Result<f64> {
    let ar = ExtendedArith;
    let cfg = StepConfig::new(Formulation::Full).with_t_rule(t_rule);
    let sys = assemble(problem, &it.lift(&ar), &cfg, &ar)?;
    let x: Vec<TwoFloat> = step
        .dz
        .iter()
        .chain(&step.dlambda)
        .chain(&step.ds)
        .map(|&v| ar.lit(v))
        .collect();
    let k: &DMatrix<TwoFloat> = &sys.matrix;
    let mut res2 = 0.0;
    let mut rhs2 = 0.0;
    for i in 0..k.nrows() {
        let mut acc = ar.neg(sys.rhs[i]);
        for (j, &xj) in x.iter().enumerate() {
            acc = ar.add(acc, ar.mul(k[(i, j)], xj));
        }
        res2 += ar.to_f64(acc).powi(2);
        rhs2 += ar.to_f64(sys.rhs[i]).powi(2);
    }
    Ok((res2 / rhs2).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::PrecisionConfig;
    use crate::stepgen::compute_step;

    #[test]
    fn native_step_has_small_residual() {
        let p = NlpProblem::TwoCircles;
        let it = p.default_start();
        let s = compute_step(p, &it, &StepConfig::new(Formulation::Condensed), &PrecisionConfig::native())
            .unwrap()
            .step;
        assert!(step_residual(p, &it, &s, TRule::MuSquared).unwrap() < 1e-14);
        let r = reference_step(p, &it, TRule::MuSquared).unwrap();
        for (a, b) in s.dz.iter().zip(&r.dz) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn reference_step_residual_is_tiny() {
        let p = NlpProblem::TwoCirclesModified;
        let it = p.default_start();
        let r = reference_step(p, &it, TRule::MuSquared).unwrap();
        assert!(step_residual(p, &it, &r, TRule::MuSquared).unwrap() < 1e-15);
    }
}
