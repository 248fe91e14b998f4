use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lorentzian_core::cov2::search_strong_certificate;
use lorentzian_core::lc::{certify_clc_homogeneous, certify_clc_homogenization};
use lorentzian_core::matroid::{Matroid, TableMode};
use lorentzian_core::rational::int;
use lorentzian_core::setfn::{CoverageInstance, SetFunction};
use lorentzian_core::SetFunctionTable;

fn coverage(n: usize) -> SetFunctionTable {
    let weights = (0..n + 2).map(|k| int(1 + (k % 3) as i64)).collect();
    let sets = (0..n).map(|i| vec![i, i + 1, (i * 5 + 2) % (n + 2)]).collect();
    CoverageInstance::from_indices(weights, sets)
        .unwrap()
        .materialize()
        .unwrap()
}

type Workload = (&'static str, Box<dyn Fn() + Sync>);

fn workloads() -> Vec<Workload> {
    let u = Matroid::uniform(5, 12)
        .unwrap()
        .to_setfunction(TableMode::Indicator)
        .unwrap();
    let hom = coverage(9);
    let strong = coverage(7);
    vec![
        (
            "homogeneous U(5,12)",
            Box::new(move || {
                black_box(certify_clc_homogeneous(&u, 5).unwrap());
            }),
        ),
        (
            "homogenization coverage n=9",
            Box::new(move || {
                black_box(certify_clc_homogenization(&hom).unwrap());
            }),
        ),
        (
            "strong search coverage n=7",
            Box::new(move || {
                black_box(search_strong_certificate(&strong).unwrap().unwrap());
            }),
        ),
    ]
}

fn sweeps(c: &mut Criterion) {
    let mode = if cfg!(feature = "parallel") {
        "parallel"
    } else {
        "sequential"
    };
    let mut group = c.benchmark_group("sweeps");
    group.sample_size(10);
    for (name, work) in workloads() {
        group.bench_function(BenchmarkId::new(mode, name), |b| b.iter(&work));
        #[cfg(feature = "parallel")]
        {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            group.bench_function(BenchmarkId::new("one-thread", name), |b| b.iter(|| pool.install(&work)));
        }
    }
    group.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
