use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use morrey_bench::{exponents, models};
use morrey_core::specfun::{reg_inc_beta, QuadratureSpec};
use morrey_core::variational::DescentOptions;
use morrey_core::{
    discrete_optimize, exact_radial_minimum, norms_report, polya_szego_check, RadialProfile,
};

fn special_functions(c: &mut Criterion) {
    c.bench_function("reg_inc_beta", |b| {
        b.iter(|| reg_inc_beta(black_box(0.37), black_box(1.0 / 3.0), black_box(4.0 / 3.0)))
    });
}

fn norms(c: &mut Criterion) {
    let e = exponents();
    let spec = QuadratureSpec::default();
    let mut group = c.benchmark_group("norms_report");
    for m in models(2) {
        let power = RadialProfile::power(e, 1.0).unwrap();
        let talenti = RadialProfile::talenti(e, 1.0).unwrap();
        group.bench_with_input(BenchmarkId::new("power", m.label()), &m, |b, m| {
            b.iter(|| norms_report(black_box(&power), m, &e, &spec))
        });
        group.bench_with_input(BenchmarkId::new("talenti", m.label()), &m, |b, m| {
            b.iter(|| norms_report(black_box(&talenti), m, &e, &spec))
        });
    }
    group.finish();
}

fn minimizers(c: &mut Criterion) {
    let e = exponents();
    let spec = QuadratureSpec::default();
    let mut group = c.benchmark_group("minimizers");
    group.sample_size(20);
    for m in models(2) {
        group.bench_with_input(BenchmarkId::new("exact", m.label()), &m, |b, m| {
            b.iter(|| exact_radial_minimum(m, &e, black_box(1.0), &spec))
        });
        group.bench_with_input(BenchmarkId::new("discrete_1000", m.label()), &m, |b, m| {
            b.iter(|| discrete_optimize(m, &e, black_box(1.0), 1000, &DescentOptions::default()))
        });
    }
    group.finish();
}

fn rearrangement(c: &mut Criterion) {
    let e = exponents();
    let spec = QuadratureSpec::default();
    let h2 = &models(2)[1];
    let u = RadialProfile::piecewise_linear(vec![0.0, 0.3, 0.8, 1.5], vec![1.0, 0.6, 0.2, 0.0]).unwrap();
    c.bench_function("polya_szego_check/hyperbolic:2:1", |b| {
        b.iter(|| polya_szego_check(black_box(&u), h2, &e, &spec))
    });
}

criterion_group!(benches, special_functions, norms, minimizers, rearrangement);
criterion_main!(benches);
