//! Fixtures shared by the benchmarks.

use pdip_core::{
    assemble, AssembledSystem, Formulation, Iterate, NlpProblem, PrecisionConfig, StepConfig,
};

/// A centered iterate at the solution of `problem` with duality measure `mu`.
pub fn central_iterate(problem: NlpProblem, mu: f64) -> Iterate {
    let known = problem.known_solution();
    let lambda_b = match known.active.len() {
        1 => vec![1.0],
        _ => vec![1.0, 0.25],
    };
    known.central_iterate(problem, &lambda_b, mu)
}

pub fn system(problem: NlpProblem, formulation: Formulation, mu: f64) -> AssembledSystem {
    assemble(
        problem,
        &central_iterate(problem, mu),
        &StepConfig::new(formulation),
        &PrecisionConfig::native(),
    )
    .expect("central iterates are interior")
}
