//! Sequential vs parallel execution of the hot paths.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pknng::data::{generate, DataConstants, DatasetSpec, Embedding, Family, Noise};
use pknng::eval::{run_grid, ExperimentSpec, MethodSpec};
use pknng::{
    apsp_dijkstra_with, build_knn_graph_with, connect_graph_with, euclidean_matrix_with, prune_outlier_edges,
    ConnectorConfig, Execution, PointSet,
};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn spirals(n_per_cluster: usize) -> PointSet {
    let spec = DatasetSpec {
        n_per_cluster,
        ..DatasetSpec::new(Family::ThreeSpirals, Noise::Low, Embedding::Swiss3d, 1)
    };
    generate(&spec, &DataConstants::default()).unwrap()
}

fn stages(c: &mut Criterion) {
    for n in [100, 300] {
        let ps = spirals(n);
        let mut group = c.benchmark_group(format!("n={}", ps.n()));
        group.sample_size(10);
        let cfg = ConnectorConfig::default();
        let pruned = prune_outlier_edges(&build_knn_graph_with(&ps, 5, Execution::Sequential).unwrap().graph);
        let connected = connect_graph_with(&pruned, &ps, &cfg, Execution::Sequential).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new("euclidean", name), &exec, |b, &e| {
                b.iter(|| euclidean_matrix_with(black_box(&ps), e))
            });
            group.bench_with_input(BenchmarkId::new("knn", name), &exec, |b, &e| {
                b.iter(|| build_knn_graph_with(black_box(&ps), 5, e).unwrap())
            });
            group.bench_with_input(BenchmarkId::new("apsp", name), &exec, |b, &e| {
                b.iter(|| apsp_dijkstra_with(black_box(&connected), e).unwrap())
            });
        }
        group.finish();
    }
}

fn grid(c: &mut Criterion) {
    let spec = ExperimentSpec {
        realizations: 4,
        methods: vec![
            MethodSpec::preset("pknng-pam").unwrap(),
            MethodSpec::preset("euclidean-pam").unwrap(),
        ],
        ..Default::default()
    }
    .with_grid(&[Family::TwoArcs], &[Noise::Low], &[Embedding::Plane2d, Embedding::Swiss3d]);
    let mut group = c.benchmark_group("grid");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| run_grid(black_box(&spec), exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, stages, grid);
criterion_main!(benches);
