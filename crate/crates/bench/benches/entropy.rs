use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use mixent_bench::{discrete, gaussian_sample, mixed};
use mixent_core::entropy::{mc_entropy, mixed_entropy, EntropyOptions};
use mixent_core::estimators::{nn_differential_entropy, EstimatorOptions, StandardError};
use mixent_core::processes::{finite_horizon_poisson_entropy, order_statistics_entropy, OrderStatsMethod};
use mixent_core::rng::seeded;
use mixent_core::DensitySpec;

fn entropy(c: &mut Criterion) {
    let coin = discrete(100);
    let mix = mixed();
    let opts = EntropyOptions::default();
    c.bench_function("mixed_entropy/discrete_100", |b| b.iter(|| mixed_entropy(black_box(&coin), &opts).unwrap()));
    c.bench_function("mixed_entropy/three_families", |b| b.iter(|| mixed_entropy(black_box(&mix), &opts).unwrap()));
    c.bench_function("mc_entropy/three_families_10k", |b| {
        b.iter(|| mc_entropy(black_box(&mix), 10_000, &mut seeded(1)).unwrap())
    });
}

fn processes(c: &mut Criterion) {
    c.bench_function("finite_horizon_poisson/mean_1e4", |b| {
        b.iter(|| finite_horizon_poisson_entropy(black_box(1.0), 1e4).unwrap())
    });
    let u = DensitySpec::unit_uniform();
    c.bench_function("order_statistics/quadrature_n3", |b| {
        b.iter(|| order_statistics_entropy(black_box(&u), 3, OrderStatsMethod::Quadrature).unwrap())
    });
}

fn estimators(c: &mut Criterion) {
    let s = gaussian_sample(10_000, 3);
    let asym = EstimatorOptions {
        standard_error: StandardError::Asymptotic,
        ..EstimatorOptions::default()
    };
    c.bench_function("nn_entropy/10k_asymptotic", |b| b.iter(|| nn_differential_entropy(black_box(&s), &asym).unwrap()));
    c.bench_function("nn_entropy/10k_bootstrap", |b| {
        b.iter(|| nn_differential_entropy(black_box(&s), &EstimatorOptions::default()).unwrap())
    });
}

criterion_group!(benches, entropy, processes, estimators);
criterion_main!(benches);
