use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use lqcert::certify::{cell_upper_bound, verify_region, Cell, Mode, VerifyOptions};
use lqcert::RicParam;
use lqcert_bench::{refuting_row, strip_slice};

fn corner_bound(c: &mut Criterion) {
    let delta = RicParam::new(0.5).unwrap();
    let cell = Cell::new(0.064, 0.0641, 0.9, 0.9001).unwrap();
    let mut group = c.benchmark_group("cell_upper_bound");
    for mode in [Mode::Float, Mode::Interval] {
        group.bench_function(mode.to_string(), |b| {
            b.iter(|| cell_upper_bound(black_box(&cell), delta, mode).unwrap())
        });
    }
    group.finish();
}

fn region(c: &mut Criterion) {
    let delta = RicParam::new(0.5).unwrap();
    let mut group = c.benchmark_group("verify_region");
    group.sample_size(10);
    let slice = strip_slice();
    for workers in [1, 4] {
        let opts = VerifyOptions::default().with_workers(workers);
        group.bench_function(format!("strip_slice/float/{workers}"), |b| {
            b.iter(|| verify_region(&slice, delta, &opts).unwrap())
        });
    }
    let opts = VerifyOptions::default().with_mode(Mode::Interval).with_workers(4);
    group.bench_function("strip_slice/interval/4", |b| {
        b.iter(|| verify_region(&slice, delta, &opts).unwrap())
    });
    let row = refuting_row();
    group.bench_function("refuting_row/float/4", |b| {
        b.iter(|| verify_region(&row, delta, &VerifyOptions::default().with_workers(4)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, corner_bound, region);
criterion_main!(benches);
