use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dpart::dependency::{discretize_table, infer_network, mutual_information};
use dpart::mechanisms::Laplace;
use dpart::{fit, InstanceKind};
use dpart_bench::adult;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::hint::black_box;

fn mechanisms(c: &mut Criterion) {
    let lap = Laplace::new(1.0, 0.5).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(0);
    c.bench_function("laplace_sample", |b| b.iter(|| black_box(lap.sample(&mut rng))));
}

fn dependency(c: &mut Criterion) {
    let (table, bounds) = adult(39_074);
    let cols = discretize_table(&table, &bounds, 20).unwrap();
    c.bench_function("mutual_information_2_parents", |b| {
        b.iter(|| black_box(mutual_information(&cols[5], &[&cols[0], &cols[2]])))
    });
    let mut group = c.benchmark_group("infer_network");
    group.sample_size(10);
    for k in [1usize, 2, 3] {
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            let mut rng = ChaCha20Rng::seed_from_u64(1);
            b.iter(|| infer_network(&table, &bounds, Some(1.0), k, &mut rng).unwrap())
        });
    }
    group.finish();
}

fn engines(c: &mut Criterion) {
    let (table, bounds) = adult(10_000);
    let mut group = c.benchmark_group("fit_generate");
    group.sample_size(10);
    for kind in InstanceKind::ALL {
        let spec = kind.spec(Some(1.0), Some(bounds.clone()));
        group.bench_function(BenchmarkId::new("fit", kind.name()), |b| {
            let mut rng = ChaCha20Rng::seed_from_u64(2);
            b.iter(|| fit(&table, &spec, &mut rng).unwrap())
        });
        let model = fit(&table, &spec, &mut ChaCha20Rng::seed_from_u64(3)).unwrap().model;
        group.bench_function(BenchmarkId::new("generate", kind.name()), |b| {
            let mut rng = ChaCha20Rng::seed_from_u64(4);
            b.iter(|| model.generate(10_000, &mut rng).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, mechanisms, dependency, engines);
criterion_main!(benches);
