use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lohe_core::random::{haar_unitary_with, hermitian_zero_sum_with, rng_from_seed, unit_vector_with};
use lohe_core::sphere::SphereEnsemble;
use lohe_core::unitary::{Scheme, UnitaryEnsemble};
use lohe_core::ComplexMatrix;

fn sphere_fixture(d: usize, n: usize) -> SphereEnsemble {
    let mut rng = rng_from_seed(97);
    let points = (0..n).map(|_| unit_vector_with(d, &mut rng)).collect();
    SphereEnsemble::new(points, None, 1.0, 0.05).unwrap()
}

fn matrix_fixture(d: usize, n: usize) -> UnitaryEnsemble {
    let mut rng = rng_from_seed(101);
    let matrices: Vec<ComplexMatrix> = (0..n).map(|_| haar_unitary_with(d, &mut rng)).collect();
    let hams = hermitian_zero_sum_with(d, n, 0.3, &mut rng);
    UnitaryEnsemble::new(matrices, hams, 1.0, 0.05, Scheme::Strang).unwrap()
}

fn bench_sphere_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("sphere_step");
    for &n in &[16usize, 128, 1024] {
        let ens = sphere_fixture(8, n);
        group.bench_with_input(BenchmarkId::new("default_pool", n), &ens, |b, e| {
            b.iter(|| e.step().unwrap())
        });
        #[cfg(feature = "parallel")]
        {
            let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            group.bench_with_input(BenchmarkId::new("one_thread", n), &ens, |b, e| {
                b.iter(|| single.install(|| e.step().unwrap()))
            });
        }
    }
    group.finish();
}

fn bench_matrix_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("matrix_step");
    group.sample_size(20);
    for &n in &[8usize, 64, 256] {
        let ens = matrix_fixture(4, n);
        group.bench_with_input(BenchmarkId::new("default_pool", n), &ens, |b, e| {
            b.iter(|| e.step().unwrap())
        });
        #[cfg(feature = "parallel")]
        {
            let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            group.bench_with_input(BenchmarkId::new("one_thread", n), &ens, |b, e| {
                b.iter(|| single.install(|| e.step().unwrap()))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_sphere_step, bench_matrix_step);
criterion_main!(benches);
