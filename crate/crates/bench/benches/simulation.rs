use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use townsim::rng::RngStreams;
use townsim::synth::synthesize;
use townsim::{assign_course, ScenarioSchedule, Simulation, TownConfig};

fn config(n: usize) -> TownConfig {
    let mut cfg = TownConfig::default().with_population(n);
    cfg.population.initial_infected_share = 0.002;
    cfg
}

fn bench_setup(c: &mut Criterion) {
    let cfg = config(10_000);
    c.bench_function("synthesize 10k town", |b| {
        b.iter(|| synthesize(black_box(&cfg), &mut RngStreams::new(1).setup).unwrap())
    });
    c.bench_function("simulation setup 10k", |b| {
        b.iter(|| {
            Simulation::new(
                cfg.clone(),
                ScenarioSchedule::preset("baseline").unwrap(),
                1,
            )
            .unwrap()
        })
    });
}

fn bench_week(c: &mut Criterion) {
    let mut group = c.benchmark_group("one simulated week");
    group.sample_size(10);
    for n in [10_000usize, 82_000] {
        let cfg = config(n);
        group.bench_function(format!("{n} agents"), |b| {
            b.iter_batched(
                || {
                    Simulation::new(
                        cfg.clone(),
                        ScenarioSchedule::preset("baseline").unwrap(),
                        2,
                    )
                    .unwrap()
                },
                |mut sim| {
                    sim.run_until_day(7).unwrap();
                    sim
                },
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn bench_course(c: &mut Criterion) {
    let cfg = TownConfig::default();
    let row = cfg.age_groups[16].clone();
    c.bench_function("assign course", |b| {
        let mut s = 0.0f64;
        b.iter(|| {
            s = (s + 0.618_033_988_75) % 1.0;
            assign_course(black_box(s), &row, 0.5)
        })
    });
}

criterion_group!(benches, bench_setup, bench_week, bench_course);
criterion_main!(benches);
