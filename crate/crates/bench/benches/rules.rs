use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use eetreat::{
    assign_all, minimax_regret_binary, minimax_regret_rule, summarize_posterior, Evaluator,
    IncomeVector, PosteriorDraws, WelfareSpec,
};
use eetreat_bench::{binary_problem, bounds_rows, draws, state_set};

fn ee(c: &mut Criterion) {
    let incomes = IncomeVector::new((1..=10_000).map(|i| i as f64 * 0.37 + 1.0).collect()).unwrap();
    let mut group = c.benchmark_group("ee");
    for gamma in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let spec = WelfareSpec::new(gamma).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(gamma), &spec, |b, spec| {
            b.iter(|| spec.ee(black_box(&incomes)).unwrap())
        });
    }
    group.finish();
}

fn minimax_regret(c: &mut Criterion) {
    let mut group = c.benchmark_group("minimax_regret");
    for n in [2, 64, 4096] {
        let ss = state_set(n);
        let spec = WelfareSpec::new(2.0).unwrap();
        group.bench_with_input(BenchmarkId::new("states", n), &ss, |b, ss| {
            b.iter(|| minimax_regret_rule(&spec, black_box(ss)).unwrap())
        });
    }
    group.finish();
}

fn bounds(c: &mut Criterion) {
    let rows = bounds_rows(2.0);
    c.bench_function("assign_bounds", |b| {
        b.iter(|| assign_all(black_box(&rows)).unwrap())
    });
}

fn binary(c: &mut Criterion) {
    let problem = binary_problem(1.0);
    c.bench_function("binary_minimax_regret", |b| {
        b.iter(|| minimax_regret_binary(black_box(&problem), Evaluator::Averse).unwrap())
    });
}

fn posterior(c: &mut Criterion) {
    let d = PosteriorDraws::new("site", draws(4000)).unwrap();
    let spec = WelfareSpec::new(1.0).unwrap();
    c.bench_function("summarize_4000_draws", |b| {
        b.iter(|| summarize_posterior(&spec, black_box(&d)).unwrap())
    });
}

criterion_group!(benches, ee, minimax_regret, bounds, binary, posterior);
criterion_main!(benches);
