use braidmat::matrix::count_t0;
use braidmat::realizer::verify_theorem;
use braidmat::{Exec, RealizerOptions};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn count(c: &mut Criterion) {
    let mut g = c.benchmark_group("count_t0_n7");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| b.iter(|| count_t0(7, exec).unwrap()));
    }
    g.finish();
}

// Each iteration builds a fresh realizer, so memo tables start empty.
fn theorem(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify_theorem_n6");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                let r = verify_theorem(6, exec, RealizerOptions::default()).unwrap();
                assert!(r.succeeded());
            })
        });
    }
    g.finish();
}

criterion_group!(benches, count, theorem);
criterion_main!(benches);
