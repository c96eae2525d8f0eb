use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fourbvp_core::{
    apply_a, collocation_oracle, picard_solve_with, ExpressionFn, GridFunction, KernelContext,
    KernelMatrix, QuadratureSettings, SolveConfig,
};

fn context() -> KernelContext {
    KernelContext::new(
        ExpressionFn::parse("t^2").unwrap(),
        0.25,
        QuadratureSettings::default(),
    )
    .unwrap()
}

fn assembly(c: &mut Criterion) {
    let ctx = context();
    let mut group = c.benchmark_group("assemble");
    group.sample_size(10);
    for n in [200, 800, 2000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| KernelMatrix::assemble(&ctx, n).unwrap())
        });
    }
    group.finish();
}

fn operator(c: &mut Criterion) {
    let ctx = context();
    let f = ExpressionFn::parse("u*(1-exp(-u))").unwrap();
    let mut group = c.benchmark_group("apply_a");
    for n in [200, 800, 2000] {
        let km = KernelMatrix::assemble(&ctx, n).unwrap();
        let u = GridFunction::from_fn(n, |t| 1.0 + t * t);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| apply_a(black_box(&u), &f, &km).unwrap())
        });
    }
    group.finish();
}

fn solvers(c: &mut Criterion) {
    let ctx = context();
    let f = ExpressionFn::parse("1+u").unwrap();
    let config = SolveConfig::default();
    let km = KernelMatrix::assemble(&ctx, config.n).unwrap();
    let mut group = c.benchmark_group("solve_n800");
    group.sample_size(10);
    group.bench_function("picard", |b| {
        b.iter(|| picard_solve_with(&f, &km, &config).unwrap())
    });
    group.bench_function("collocation", |b| {
        b.iter(|| collocation_oracle(&f, &ctx, &config).unwrap())
    });
    group.finish();
}

criterion_group!(benches, assembly, operator, solvers);
criterion_main!(benches);
