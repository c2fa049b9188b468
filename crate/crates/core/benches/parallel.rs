use criterion::{criterion_group, criterion_main, Criterion};
use mmsim_core::analysis::is_triviality_preserving;
use mmsim_core::random::{random_classical_realization, rng};
use mmsim_core::supermap::{from_classical_realization, realize, Shape, Superchannel};

fn instance() -> Superchannel {
    let real = random_classical_realization(Shape::new(3, 2, 2), Shape::new(2, 2, 2), 2, false, &mut rng(1)).unwrap();
    from_classical_realization(&real).unwrap()
}

fn pools(c: &mut Criterion) {
    let psi = instance();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let default = rayon::ThreadPoolBuilder::new().build().unwrap();
    for (label, pool) in [("1-thread", &single), ("default", &default)] {
        c.bench_function(&format!("realize/{label}"), |b| b.iter(|| pool.install(|| realize(&psi).unwrap())));
        c.bench_function(&format!("is_triviality_preserving/{label}"), |b| {
            b.iter(|| pool.install(|| is_triviality_preserving(&psi).unwrap()))
        });
    }
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = pools
}
criterion_main!(benches);
