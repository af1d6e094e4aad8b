use criterion::{black_box, criterion_group, criterion_main, Criterion};
use icbargain::{run_sweep, run_sweep_serial, solve_nbs, AxisSpec, StandardChannel, SweepSpec};

fn bench_solve(c: &mut Criterion) {
    let sc = StandardChannel::new(100.0, 31.6228, 0.4, 0.7, 2.0).unwrap();
    c.bench_function("solve_nbs_20db_15db", |b| {
        b.iter(|| solve_nbs(black_box(&sc), 1e-10).unwrap())
    });
}

fn bench_sweep(c: &mut Criterion) {
    // 21x21 SNR grid, same protocol as the full sweep at a bench-friendly size
    let spec = SweepSpec::SnrGrid {
        alpha: 0.7,
        beta: 0.7,
        snr1_db: AxisSpec::new(0.0, 40.0, 2.0),
        snr2_db: AxisSpec::new(0.0, 40.0, 2.0),
        w: 2.0,
    };

    let mut group = c.benchmark_group("snr_sweep_21x21");
    group.sample_size(30);
    group.bench_function("serial", |b| {
        b.iter(|| run_sweep_serial(black_box(&spec)).unwrap())
    });
    group.bench_function("parallel_all_cores", |b| {
        b.iter(|| run_sweep(black_box(&spec), 0).unwrap())
    });
    group.bench_function("parallel_2_workers", |b| {
        b.iter(|| run_sweep(black_box(&spec), 2).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_solve, bench_sweep);
criterion_main!(benches);
