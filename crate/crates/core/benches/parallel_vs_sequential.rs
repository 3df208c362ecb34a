//! Data-parallel vs sequential execution of the two embarrassingly
//! parallel workloads: randomized circuit-realization simulation and
//! multi-start coordinate ascent.  Both paths produce bitwise-identical
//! results; this suite measures what the thread pool buys on the
//! current machine.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use coordcert_core::exec::ExecMode;
use coordcert_core::ineq::{
    chsh_tsirelson_calibration, random_realization_suite, AscentOptions, MultiStartOptions,
};

fn modes() -> [(&'static str, ExecMode); 2] {
    [
        ("sequential", ExecMode::Sequential),
        ("parallel", ExecMode::Parallel),
    ]
}

fn bench_random_suite(c: &mut Criterion) {
    let mut g = c.benchmark_group("random_realization_suite");
    g.sample_size(10);
    for (name, mode) in modes() {
        g.bench_with_input(BenchmarkId::new(name, 40), &mode, |b, &mode| {
            b.iter(|| random_realization_suite(black_box(40), 3, 7, mode).unwrap());
        });
    }
    g.finish();
}

fn bench_multi_start(c: &mut Criterion) {
    let mut g = c.benchmark_group("chsh_calibration");
    g.sample_size(10);
    for (name, mode) in modes() {
        let o = MultiStartOptions {
            restarts: 16,
            seed: 1,
            mode,
            ascent: AscentOptions::default(),
        };
        g.bench_with_input(BenchmarkId::new(name, 16), &o, |b, o| {
            b.iter(|| chsh_tsirelson_calibration(black_box(o)));
        });
    }
    g.finish();
}

criterion_group!(benches, bench_random_suite, bench_multi_start);
criterion_main!(benches);
