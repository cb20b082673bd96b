use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use huffdp::eval::mae_over_seeds;
use huffdp::synthetic::{heavy_mode_stream, stream_with_distinct};
use huffdp::{
    build_tree, run_baseline, run_huffdp, Baseline, BudgetConfig, Execution, FrequencyTable,
    MechanismSpec, RunConfig, Selector,
};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn config(exec: Execution) -> RunConfig {
    RunConfig {
        budget: BudgetConfig::new(Selector::Fuzzy, 1.0),
        execution: exec,
        ..RunConfig::default()
    }
}

fn bench_build_tree(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_tree");
    for distinct in [100, 2_000, 20_000] {
        let stream = stream_with_distinct(distinct * 3, distinct, 1);
        let freq = FrequencyTable::from_stream(&stream).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(distinct), &freq, |b, f| {
            b.iter(|| build_tree(black_box(f)).unwrap())
        });
    }
    group.finish();
}

fn bench_huffdp(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_huffdp");
    for (n, distinct) in [(5_000, 1_400), (100_000, 20_000)] {
        let stream = stream_with_distinct(n, distinct, 2);
        for (name, exec) in MODES {
            let cfg = config(exec);
            group.bench_with_input(BenchmarkId::new(name, n), &stream, |b, s| {
                b.iter(|| run_huffdp(black_box(s), &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_baseline(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_baseline_staircase");
    let stream = heavy_mode_stream(100_000, 3);
    for (name, exec) in MODES {
        let cfg = config(exec);
        group.bench_function(name, |b| {
            b.iter(|| run_baseline(black_box(&stream), Baseline::Staircase, 1.0, &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_seed_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("mae_over_100_seeds");
    group.sample_size(20);
    let stream = heavy_mode_stream(5_000, 4);
    let spec = MechanismSpec::HuffDp {
        selector: Selector::Sine,
        beta: 1.0,
    };
    let seeds: Vec<u64> = (0..100).collect();
    let cfg = RunConfig::default();
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| mae_over_seeds(black_box(&stream), &spec, &cfg, &seeds, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_build_tree,
    bench_huffdp,
    bench_baseline,
    bench_seed_sweep
);
criterion_main!(benches);
