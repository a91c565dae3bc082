use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use ruin_bench::{company2_dominates, interior_half};
use ruin_core::seeding::replication_rng;
use ruin_core::{estimate_ruin, log_rate_and, Estimator, FbmGenerator, Grid, HurstIndex, LogRateOptions, RuinQuery, RuinType};

fn sampling(c: &mut Criterion) {
    let h = HurstIndex::new(0.7).unwrap();
    let circ = FbmGenerator::new(Grid::new(1.0, 2049).unwrap(), h).unwrap();
    let chol = FbmGenerator::cholesky(Grid::new(1.0, 256).unwrap(), h).unwrap();
    for (name, gen) in [("circulant_2049", circ), ("cholesky_256", chol)] {
        let mut scratch = gen.scratch();
        let mut out = vec![0.0; gen.grid().len()];
        let mut i = 0u64;
        c.bench_function(name, |b| {
            b.iter_batched(
                || {
                    i += 1;
                    replication_rng(1, i)
                },
                |mut rng| gen.fill(&mut rng, &mut scratch, black_box(&mut out)),
                BatchSize::SmallInput,
            )
        });
    }
}

fn log_rate(c: &mut Criterion) {
    let p = company2_dominates();
    c.bench_function("log_rate_and", |b| b.iter(|| log_rate_and(black_box(&p), LogRateOptions::default())));
}

fn simulate(c: &mut Criterion) {
    let p = interior_half();
    let q = RuinQuery::new(p, RuinType::Joint, Grid::new(3.0, 257).unwrap(), 4096, 1, Estimator::Shifted).unwrap();
    let mut g = c.benchmark_group("estimate_ruin");
    g.sample_size(10);
    g.bench_function("joint_shifted_257x4096", |b| b.iter(|| estimate_ruin(black_box(&q)).unwrap()));
    g.finish();
}

criterion_group!(benches, sampling, log_rate, simulate);
criterion_main!(benches);
