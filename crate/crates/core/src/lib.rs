//! Geodesic dissimilarities from a pruned k-nearest-neighbor graph with
//! penalized connector edges, plus the clustering algorithms, synthetic
//! datasets and experiment harness used to evaluate them.
//!
//! The pipeline for one point set:
//!
//! 1. [`build_knn_graph`] joins every point to its `k` nearest neighbors.
//! 2. [`prune_outlier_edges`] drops long non-reciprocal edges.
//! 3. [`connect_graph`] links the remaining components with penalized edges.
//! 4. [`apsp_dijkstra`] turns the connected graph into a dissimilarity matrix.
//!
//! [`pknng_metric`] runs all four steps.

pub mod cluster;
pub mod connect;
pub mod data;
pub mod error;
pub mod eval;
pub mod geodesic;
pub mod graph;
pub mod knn;
pub mod par;
pub mod points;
pub mod rng;

pub use connect::{
    connect_graph, connect_graph_with, penalized_weight, ConnectorConfig, MuSource, Penalty, Scheme,
};
pub use error::{Error, IdxError, Result};
pub use geodesic::{
    apsp_dijkstra, apsp_dijkstra_with, apsp_floyd_warshall, min_k_metric, pknng_metric, pknng_metric_with,
    PknngOutput,
};
pub use graph::{components, ComponentLabeling, DisjointSets, Edge, EdgeKind, WeightedGraph};
pub use knn::{build_knn_graph, build_knn_graph_with, prune_outlier_edges, KnnGraph, DEFAULT_K};
pub use par::Execution;
pub use points::{euclidean_matrix, euclidean_matrix_with, DissimilarityMatrix, PointSet};
pub use rng::{derive_seed, SeededRng};
