use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use semican::quiver::{enumerate_multisegments, refine_order};
use semican::QuiverSpec;
use semican_bench::{cold_engine, dim, label, CASES};

fn certified(c: &mut Criterion) {
    let mut g = c.benchmark_group("certified_transition");
    g.sample_size(10);
    for &(n, d) in CASES {
        g.bench_with_input(BenchmarkId::from_parameter(label(n, d)), &(n, d), |b, &(n, d)| {
            b.iter(|| cold_engine(n).certified_transition(&dim(d)).expect("certifies"))
        });
    }
    g.finish();
}

fn inversion_only(c: &mut Criterion) {
    let mut g = c.benchmark_group("transition_via_inversion");
    g.sample_size(10);
    for &(n, d) in CASES {
        g.bench_with_input(BenchmarkId::from_parameter(label(n, d)), &(n, d), |b, &(n, d)| {
            b.iter(|| cold_engine(n).transition_via_inversion(&dim(d)).expect("inverts"))
        });
    }
    g.finish();
}

fn degeneration_order(c: &mut Criterion) {
    let spec = QuiverSpec::new(3).unwrap();
    let d = dim(&[3, 3, 3]);
    c.bench_function("refine_order/n3/3,3,3", |b| {
        b.iter(|| refine_order(&enumerate_multisegments(spec, &d).unwrap()).unwrap())
    });
}

criterion_group!(benches, certified, inversion_only, degeneration_order);
criterion_main!(benches);
