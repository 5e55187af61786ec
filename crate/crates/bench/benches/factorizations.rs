use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nalgebra::DMatrix;
use pdip_bench::system;
use pdip_core::linalg::{bunch_kaufman, bunch_parlett, cholesky, gepp_solve};
use pdip_core::{Formulation, NlpProblem, PrecisionConfig};

fn random_symmetric(n: usize) -> DMatrix<f64> {
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let a = DMatrix::from_fn(n, n, |_, _| next());
    &a + a.transpose()
}

fn bench_kernels(c: &mut Criterion) {
    let native = PrecisionConfig::native();
    let p24 = PrecisionConfig::emulated(24).unwrap();
    let t = random_symmetric(8);
    let b = vec![1.0; 8];
    let aug = system(NlpProblem::ThreeCircles, Formulation::Augmented, 1e-8).matrix;
    let cond = system(NlpProblem::TwoCircles, Formulation::Condensed, 1e-8).matrix;

    c.bench_function("bunch_kaufman 8x8", |bn| bn.iter(|| bunch_kaufman(black_box(&t), &native)));
    c.bench_function("bunch_parlett 8x8", |bn| bn.iter(|| bunch_parlett(black_box(&t), &native)));
    c.bench_function("gepp 8x8", |bn| bn.iter(|| gepp_solve(black_box(&t), &b, &native)));
    c.bench_function("gepp 8x8 p24", |bn| bn.iter(|| gepp_solve(black_box(&t), &b, &p24)));
    c.bench_function("bunch_kaufman augmented", |bn| {
        bn.iter(|| bunch_kaufman(black_box(&aug), &native))
    });
    c.bench_function("cholesky condensed", |bn| bn.iter(|| cholesky(black_box(&cond), &native)));
}

criterion_group!(benches, bench_kernels);
criterion_main!(benches);
