use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ftlabel::instance::sequential;
use ftlabel::{gen, sketch, vft1, vft2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn encode(c: &mut Criterion) {
    let mut group = c.benchmark_group("encode");
    group.sample_size(10);
    for n in [256usize, 1024] {
        let g = gen::sparse_random(n, &mut ChaCha8Rng::seed_from_u64(n as u64));
        group.bench_with_input(BenchmarkId::new("1vft/parallel", n), &g, |b, g| b.iter(|| vft1::encode_1vft(g)));
        group.bench_with_input(BenchmarkId::new("1vft/sequential", n), &g, |b, g| b.iter(|| sequential(|| vft1::encode_1vft(g))));
        group.bench_with_input(BenchmarkId::new("2vft/parallel", n), &g, |b, g| b.iter(|| vft2::encode_2vft(g)));
        group.bench_with_input(BenchmarkId::new("2vft/sequential", n), &g, |b, g| b.iter(|| sequential(|| vft2::encode_2vft(g))));
        group.bench_with_input(BenchmarkId::new("eft/parallel", n), &g, |b, g| b.iter(|| sketch::encode_eft(g, 1)));
        group.bench_with_input(BenchmarkId::new("eft/sequential", n), &g, |b, g| b.iter(|| sequential(|| sketch::encode_eft(g, 1))));
    }
    group.finish();
}

criterion_group!(benches, encode);
criterion_main!(benches);
