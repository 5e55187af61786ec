use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pdip_core::{
    run, CentralityParams, Formulation, NlpProblem, PrecisionConfig, SolverKind, StepConfig,
    StopCriteria,
};

fn bench_runs(c: &mut Criterion) {
    let problem = NlpProblem::TwoCircles;
    let known = problem.known_solution();
    let start = problem.default_start();
    let stop = StopCriteria {
        mu_min: 0.0,
        max_iters: 10,
        step_fraction: 0.99,
    };
    let configs = [
        ("augmented gepp", StepConfig::new(Formulation::Augmented).with_solver(SolverKind::Gepp)),
        ("condensed cholesky", StepConfig::new(Formulation::Condensed)),
        ("full gepp", StepConfig::new(Formulation::Full)),
    ];
    for (name, cfg) in configs {
        for (label, pc) in [("p53", PrecisionConfig::native()), ("p24", PrecisionConfig::emulated(24).unwrap())] {
            c.bench_function(&format!("trace {name} {label}"), |b| {
                b.iter(|| {
                    run(
                        problem,
                        Some(&known),
                        black_box(&start),
                        &cfg,
                        &CentralityParams::default(),
                        &pc,
                        &stop,
                    )
                })
            });
        }
    }
}

criterion_group!(benches, bench_runs);
criterion_main!(benches);
