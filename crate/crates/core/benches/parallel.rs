//! Data-parallel core against its sequential execution.
//!
//! With the default `parallel` feature each workload runs on a one-thread
//! rayon pool and on the default pool. Built with `--no-default-features`
//! the same workloads run through the sequential fallback.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use sgl::fem;
use sgl::gap::{self, BoundOptions};
use sgl::mesh::generate;
use sgl::CurvaturePair;

fn workloads(c: &mut Criterion, label: &str, run: &dyn Fn(&mut (dyn FnMut() + Send))) {
    let square = generate::unit_square(60).unwrap();
    let pentagon = generate::regular_polygon(-1.0, 5, 1.0, 4).unwrap();
    let mut group = c.benchmark_group(label);
    group.sample_size(10);
    group.bench_function("fem_square_60", |b| {
        b.iter(|| {
            let mut out = None;
            run(&mut || out = Some(fem::solve_mesh(black_box(&square)).unwrap().1.lambda2));
            out
        })
    });
    group.bench_function("pipeline_pentagon", |b| {
        let pair = CurvaturePair::equal(-1.0);
        let opts = BoundOptions::default();
        b.iter(|| {
            let mut out = None;
            run(&mut || out = Some(gap::evaluate_mesh(black_box(&pentagon), 1.0, &pair, &opts).unwrap().report.gap));
            out
        })
    });
    group.finish();
}

#[cfg(feature = "parallel")]
fn bench(c: &mut Criterion) {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    workloads(c, "one_thread", &|f| single.install(|| f()));
    workloads(c, &format!("pool_{}_threads", rayon::current_num_threads()), &|f| f());
}

#[cfg(not(feature = "parallel"))]
fn bench(c: &mut Criterion) {
    workloads(c, "sequential_fallback", &|f| f());
}

criterion_group!(benches, bench);
criterion_main!(benches);
