use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dmic_bench::{bench_config, channels};
use dmic_core::{
    achievable_region_zic, blahut_arimoto, grid_oracle, marginal_channels, maximize_product_input,
    sumrate_weak_zic, weak_zic_objective,
};

fn bench_blahut_arimoto(c: &mut Criterion) {
    let cfg = bench_config();
    let mut group = c.benchmark_group("blahut_arimoto");
    for (name, ch) in channels() {
        let (y1, _) = marginal_channels(&ch);
        group.bench_function(name, |b| {
            b.iter(|| blahut_arimoto(black_box(&y1), &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_sum_rate_search(c: &mut Criterion) {
    let cfg = bench_config();
    let mut group = c.benchmark_group("weak-zic");
    group.sample_size(10);
    for (name, ch) in channels() {
        let dims = [ch.nx1(), ch.nx2()];
        for step in [0.05, 0.01] {
            group.bench_with_input(
                BenchmarkId::new(format!("grid/{name}"), step),
                &step,
                |b, &s| b.iter(|| grid_oracle(weak_zic_objective(&ch), &dims, s).unwrap()),
            );
        }
        group.bench_function(format!("compass/{name}"), |b| {
            b.iter(|| maximize_product_input(weak_zic_objective(&ch), &dims, &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_end_to_end(c: &mut Criterion) {
    let cfg = bench_config();
    let mut group = c.benchmark_group("end_to_end");
    group.sample_size(10);
    for (name, ch) in channels() {
        group.bench_function(format!("sumrate/{name}"), |b| {
            b.iter(|| sumrate_weak_zic(black_box(&ch), &cfg).unwrap())
        });
        group.bench_function(format!("region/{name}"), |b| {
            b.iter(|| achievable_region_zic(black_box(&ch), &cfg, 32).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_blahut_arimoto,
    bench_sum_rate_search,
    bench_end_to_end
);
criterion_main!(benches);
