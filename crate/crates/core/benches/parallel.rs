//! Parallel vs sequential paths for the data-parallel workloads.

use beamsnet::dvl::{corrupt_beams, ls_estimate, BeamErrorParams, BeamGeometry, BodyVelocity};
use beamsnet::model::{BeamsNet, BeamsNetV2Config};
use beamsnet::par::{map_indexed, map_indexed_seq, map_slice, map_slice_seq};
use beamsnet::seed::{component_rng, rng_from_seed};
use beamsnet::sim::fixture::{generate_recorded_mission, FixtureSpec};
use beamsnet::sim::{build_dataset, simulate_mission, ImuErrorParams, TrajectorySpec};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

const CHUNKS: usize = 16;
const PER_CHUNK: usize = 5_000;

fn ls_chunk(g: &BeamGeometry, p: &BeamErrorParams, chunk: usize) -> f64 {
    let mut rng = component_rng(p.seed, "bench_ls", chunk as u64);
    let v = BodyVelocity([2.0, 0.1, 0.0]);
    (0..PER_CHUNK)
        .map(|_| {
            let e = ls_estimate(g, corrupt_beams(g, v, p, &mut rng));
            (e.0[0] - v.0[0]).powi(2)
        })
        .sum()
}

fn monte_carlo_ls(c: &mut Criterion) {
    let g = BeamGeometry::default();
    let p = BeamErrorParams::reference(1);
    let mut group = c.benchmark_group("monte_carlo_ls");
    group.bench_function("parallel", |b| b.iter(|| black_box(map_indexed(CHUNKS, |i| ls_chunk(&g, &p, i)))));
    group.bench_function("sequential", |b| b.iter(|| black_box(map_indexed_seq(CHUNKS, |i| ls_chunk(&g, &p, i)))));
    group.finish();
}

fn batch_prediction(c: &mut Criterion) {
    let m = simulate_mission(
        "bench",
        &TrajectorySpec::new(1.0, 600.0),
        &BeamGeometry::default(),
        &ImuErrorParams::default_with_seed(1),
        &BeamErrorParams::reference(2),
    )
    .unwrap();
    let ds = build_dataset(&m, 3).unwrap();
    let net = BeamsNet::v2(BeamsNetV2Config::default(), &mut rng_from_seed(3)).unwrap();
    let mut group = c.benchmark_group("predict_v2");
    group.bench_function("parallel", |b| b.iter(|| black_box(map_slice(&ds.windows, |w| net.predict(w).unwrap()))));
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(map_slice_seq(&ds.windows, |w| net.predict(w).unwrap())))
    });
    group.finish();
}

fn fixture_generation(c: &mut Criterion) {
    let spec = FixtureSpec {
        missions: 4,
        duration: 60.0,
        ..FixtureSpec::default()
    };
    let imu = ImuErrorParams::default_with_seed(1);
    let mut group = c.benchmark_group("fixture_missions");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(map_indexed(spec.missions, |i| generate_recorded_mission(&spec, i, &imu).unwrap())))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(map_indexed_seq(spec.missions, |i| generate_recorded_mission(&spec, i, &imu).unwrap())))
    });
    group.finish();
}

criterion_group!(benches, monte_carlo_ls, batch_prediction, fixture_generation);
criterion_main!(benches);
