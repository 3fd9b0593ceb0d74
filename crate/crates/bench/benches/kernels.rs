use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ss_core::fuzz::{random_alpha, random_filtered_complex, AlphaMode, ComplexBounds};
use ss_core::geometry::{build_model, d2_from_alpha};
use ss_core::lefschetz::{degeneration_certify, CertifyOptions};
use ss_core::{Matrix, ModelKind, SpectralSequence};

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let entries: Vec<i64> = (0..rows * cols).map(|_| rng.gen_range(-3..=3)).collect();
    Matrix::from_ints(rows, cols, &entries)
}

fn linear_algebra(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = random_matrix(&mut rng, 24, 32);
    c.bench_function("rank 24x32", |b| b.iter(|| m.rank()));
    c.bench_function("kernel 24x32", |b| b.iter(|| m.kernel()));
}

fn pages(c: &mut Criterion) {
    let bounds = ComplexBounds::default();
    let complexes: Vec<_> = (0..16)
        .map(|i| random_filtered_complex(&mut ChaCha8Rng::seed_from_u64(i), &bounds))
        .collect();
    c.bench_function("pages to E_inf, 16 random complexes", |b| {
        b.iter_batched(
            || complexes.clone(),
            |fks| {
                for fk in fks {
                    let mut ss = SpectralSequence::new(fk).unwrap();
                    ss.e_infinity().unwrap();
                }
            },
            BatchSize::SmallInput,
        )
    });
}

fn derivations(c: &mut Criterion) {
    let model = build_model(&ModelKind::Torus(2)).unwrap();
    let datum = random_alpha(&mut ChaCha8Rng::seed_from_u64(3), &model, AlphaMode::OmegaClosed);
    c.bench_function("d2 from alpha on torus(2)", |b| b.iter(|| d2_from_alpha(&model, &datum).unwrap()));
    let d = d2_from_alpha(&model, &datum).unwrap();
    c.bench_function("certify on torus(2)", |b| {
        b.iter(|| degeneration_certify(model.algebra(), &d, CertifyOptions::default()).unwrap())
    });
}

criterion_group!(kernels, linear_algebra, pages, derivations);
criterion_main!(kernels);
