//! Sequential against parallel execution of the batch workloads: a seed
//! sweep of full SPPA runs and a randomized resolvent property batch.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sppa_core::{
    lemma_residual, prox, run_seeds, EuclideanPoint, Execution, Marginal, ProxVariant, Sampler,
    SpacePoint, SplitMix64, StepSchedule,
};

const MODES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

fn least_squares(dim: usize, rows: usize) -> (SpacePoint, Sampler) {
    let mut rng = SplitMix64::new(7);
    let support = (0..rows)
        .map(|_| Marginal::SqAffine {
            a: EuclideanPoint::new((0..dim).map(|_| rng.range(-3.0, 3.0)).collect()).unwrap(),
            b: rng.range(-1.0, 1.0),
        })
        .collect();
    (
        SpacePoint::Euclidean(EuclideanPoint::zeros(dim)),
        Sampler::uniform(support, 0).unwrap(),
    )
}

fn seed_sweep(c: &mut Criterion) {
    let (start, sampler) = least_squares(5, 20);
    let schedule = StepSchedule::default();
    let seeds: Vec<u64> = (1..=16).collect();
    let mut group = c.benchmark_group("seed_sweep_16x20k");
    group.sample_size(10);
    for exec in MODES {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &exec,
            |b, &exec| {
                b.iter(|| {
                    run_seeds(
                        &start,
                        &sampler,
                        &schedule,
                        20_000,
                        None,
                        black_box(&seeds),
                        exec,
                    )
                    .unwrap()
                })
            },
        );
    }
    group.finish();
}

fn property_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("resolvent_inequality_7x10k");
    group.sample_size(10);
    for exec in MODES {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &exec,
            |b, &exec| {
                b.iter(|| {
                    ProxVariant::ALL.map(|v| {
                        exec.min_indexed(10_000, |i| {
                            let mut rng = SplitMix64::derive(1, i as u64);
                            let (space, req) = v.random_request(&mut rng);
                            let y = space.random_in_ball(&prox(&req), 5.0, &mut rng);
                            lemma_residual(&req, &y).unwrap()
                        })
                    })
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, seed_sweep, property_batch);
criterion_main!(benches);
