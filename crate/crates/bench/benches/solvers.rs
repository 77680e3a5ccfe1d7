//! Solver throughput on a fixed squared-loss task: plain Frank-Wolfe in the
//! dual, the primal subgradient method, and one private release end to end.

use criterion::{criterion_group, criterion_main, Criterion};
use sparsedp::dp::private_frank_wolfe;
use sparsedp::erm::{frank_wolfe_dual, solve_primal_subgradient, StepRule};
use sparsedp::rng::stream_seed;
use sparsedp::synth::{DataGenerator, LassoSynthetic};
use sparsedp::{DualProblem, ErmProblem, LossKind, PrivacyParams, SubmodularFn};
use std::hint::black_box;

fn problem(p: usize, n: usize) -> ErmProblem {
    let gen = LassoSynthetic::new(p, 42).unwrap();
    let data = gen.generate(n, stream_seed(42, "bench-data", n as u64)).unwrap();
    let f = SubmodularFn::cardinality(p).unwrap();
    ErmProblem::new(data, LossKind::Squared, f, 2.0, 10.0).unwrap()
}

fn frank_wolfe(c: &mut Criterion) {
    let prob = problem(4, 200);
    let dp = DualProblem::build(&prob, 1000, 5).unwrap();
    c.bench_function("frank_wolfe_dual/p4_n200_T50", |b| {
        b.iter(|| frank_wolfe_dual(black_box(&dp), 50).unwrap())
    });
}

fn subgradient(c: &mut Criterion) {
    let prob = problem(4, 200);
    c.bench_function("subgradient/p4_n200_500it", |b| {
        b.iter(|| {
            solve_primal_subgradient(black_box(&prob), 500, StepRule::InvSqrt { eta0: 0.5 }, 9)
                .unwrap()
        })
    });
}

fn private_release(c: &mut Criterion) {
    let prob = problem(4, 200);
    let dp = DualProblem::build(&prob, 1000, 5).unwrap();
    let params = PrivacyParams::new(1.0, 1e-6).unwrap();
    c.bench_function("private_frank_wolfe/p4_n200_T64", |b| {
        b.iter(|| {
            private_frank_wolfe(black_box(&dp), None, &params, Some(64), 31).unwrap()
        })
    });
}

criterion_group!(benches, frank_wolfe, subgradient, private_release);
criterion_main!(benches);
