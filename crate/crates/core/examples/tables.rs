//! Prints the reference traces as markdown tables.

use pdip_core::diagnostics::{emit_table, TableFormat};
use pdip_core::{
    run, CentralityParams, Formulation, NlpProblem, PrecisionConfig, SolverKind, StepConfig,
    StopCriteria,
};

fn main() {
    let bits: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(53);
    let pc = PrecisionConfig::from_bits(bits).expect("bits in [11, 53]");
    let stop = StopCriteria {
        mu_min: 0.0,
        max_iters: 10,
        step_fraction: 0.99,
    };
    let runs = [
        (NlpProblem::TwoCircles, StepConfig::new(Formulation::Augmented).with_solver(SolverKind::Gepp)),
        (NlpProblem::TwoCircles, StepConfig::new(Formulation::Condensed)),
        (NlpProblem::TwoCirclesModified, StepConfig::new(Formulation::Condensed)),
        (NlpProblem::ThreeCircles, StepConfig::new(Formulation::Augmented)),
    ];
    for (problem, cfg) in runs {
        let known = problem.known_solution();
        let trace = run(
            problem,
            Some(&known),
            &problem.default_start(),
            &cfg,
            &CentralityParams::default(),
            &pc,
            &stop,
        )
        .expect("valid configuration");
        println!("{} {} {} p={bits}: {:?}", problem.key(), cfg.formulation, cfg.solver, trace.termination);
        println!("{}", emit_table(&trace, Some(&known), TableFormat::Md));
    }
}
