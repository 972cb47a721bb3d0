use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ckmo::coreset::{build_coreset, CoresetConfig};
use ckmo::flow::cost_m;
use ckmo::solver::{solve_ckmo, CkmSolverConfig, SolveConfig};
use ckmo::verify::generate::{generate_instance, GeneratorParams};

fn mcfo(c: &mut Criterion) {
    let mut group = c.benchmark_group("cost_m");
    for n in [50, 200, 800] {
        let inst = generate_instance(&GeneratorParams::new(n, 10, 4, 5), 1);
        let open: Vec<usize> = (0..4).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| cost_m(inst, black_box(&open), inst.m).unwrap())
        });
    }
    group.finish();
}

fn coreset(c: &mut Criterion) {
    let mut params = GeneratorParams::new(500, 10, 3, 3);
    params.dim = 4;
    let inst = generate_instance(&params, 2);
    let config = CoresetConfig {
        s_override: Some(8),
        ..CoresetConfig::default()
    };
    c.bench_function("build_coreset/500", |b| {
        b.iter(|| build_coreset(&inst, 0.5, &config, black_box(7)).unwrap())
    });
}

fn solve(c: &mut Criterion) {
    let mut params = GeneratorParams::new(60, 6, 2, 1);
    params.dim = 3;
    let inst = generate_instance(&params, 3);
    let config = SolveConfig {
        coreset: CoresetConfig {
            s_override: Some(3),
            ..CoresetConfig::default()
        },
        ckm: CkmSolverConfig::local_search(),
        ..SolveConfig::default()
    };
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    group.bench_function("local_search/60", |b| {
        b.iter(|| solve_ckmo(&inst, 0.5, &config, black_box(0)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, mcfo, coreset, solve);
criterion_main!(benches);
