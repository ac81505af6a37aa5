//! k-nearest-neighbor graph construction and outlier-edge pruning.

use crate::error::{Error, Result};
use crate::graph::{DisjointSets, Edge, EdgeKind, WeightedGraph};
use crate::par::Execution;
use crate::points::{euclidean, PointSet};

/// Floor for zero-length edges between duplicate points.
pub const MIN_EDGE_WEIGHT: f64 = 1e-12;

/// Default neighbor count.
pub const DEFAULT_K: usize = 5;

#[derive(Clone, Debug)]
pub struct KnnGraph {
    pub graph: WeightedGraph,
    /// Per-vertex neighbor lists, nearest first.
    pub neighbors: Vec<Vec<usize>>,
    /// Number of edges whose zero length was clamped to [`MIN_EDGE_WEIGHT`].
    pub clamped_duplicates: usize,
}

/// The `k` nearest neighbors of every point, ordered by distance with ties
/// going to the lower index.
pub fn knn_lists(ps: &PointSet, k: usize, exec: Execution) -> Result<Vec<Vec<usize>>> {
    let n = ps.n();
    if k == 0 || k >= n {
        return Err(Error::param(format!("k = {k} must satisfy 1 <= k < n = {n}")));
    }
    Ok(exec.map_range(n, |v| nearest(ps, v, k)))
}

fn nearest(ps: &PointSet, v: usize, k: usize) -> Vec<usize> {
    let pv = ps.point(v);
    let mut cand: Vec<(f64, usize)> = (0..ps.n())
        .filter(|&u| u != v)
        .map(|u| (euclidean(pv, ps.point(u)), u))
        .collect();
    let by_dist = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < cand.len() {
        cand.select_nth_unstable_by(k - 1, by_dist);
        cand.truncate(k);
    }
    cand.sort_unstable_by(by_dist);
    cand.into_iter().map(|(_, u)| u).collect()
}

pub fn build_knn_graph(ps: &PointSet, k: usize) -> Result<KnnGraph> {
    build_knn_graph_with(ps, k, Execution::default())
}

/// Undirected knn-graph: an ORIGINAL edge joins `v` to each of its `k`
/// nearest neighbors, stored once per pair and weighted by Euclidean
/// distance. An edge is reciprocal when each endpoint is among the other's
/// `k` nearest neighbors.
pub fn build_knn_graph_with(ps: &PointSet, k: usize, exec: Execution) -> Result<KnnGraph> {
    let neighbors = knn_lists(ps, k, exec)?;
    let (graph, clamped_duplicates) = graph_from_lists(ps, &neighbors);
    Ok(KnnGraph {
        graph,
        neighbors,
        clamped_duplicates,
    })
}

fn graph_from_lists(ps: &PointSet, neighbors: &[Vec<usize>]) -> (WeightedGraph, usize) {
    let n = ps.n();
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(n * neighbors.first().map_or(0, Vec::len));
    for (v, list) in neighbors.iter().enumerate() {
        for &u in list {
            pairs.push(if v < u { (v, u) } else { (u, v) });
        }
    }
    pairs.sort_unstable();
    let mut edges = Vec::with_capacity(pairs.len());
    let mut clamped = 0;
    let mut idx = 0;
    while idx < pairs.len() {
        let (i, j) = pairs[idx];
        let mut run = 1;
        while idx + run < pairs.len() && pairs[idx + run] == (i, j) {
            run += 1;
        }
        idx += run;
        // Lists hold distinct vertices, so the pair shows up twice exactly
        // when both directions chose it.
        let reciprocal = run == 2;
        let mut w = ps.dist(i, j);
        if w <= 0.0 {
            w = MIN_EDGE_WEIGHT;
            clamped += 1;
        }
        edges.push(Edge::new(i, j, w, EdgeKind::Original, reciprocal));
    }
    let g = WeightedGraph::from_edges(n, edges).expect("knn edges are valid");
    (g, clamped)
}

/// Quantile of sorted values with linear interpolation between order
/// statistics at position `p * (m - 1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// `Q3 + 1.5 * (Q3 - Q1)` of the given weights.
pub fn outlier_threshold(weights: &[f64]) -> f64 {
    let mut w = weights.to_vec();
    w.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&w, 0.25);
    let q3 = quantile_sorted(&w, 0.75);
    q3 + 1.5 * (q3 - q1)
}

/// Drop every edge that is not reciprocal and longer than the outlier
/// threshold of the graph's full weight distribution. Single pass.
pub fn prune_outlier_edges(g: &WeightedGraph) -> WeightedGraph {
    if g.num_edges() == 0 {
        return g.clone();
    }
    let weights: Vec<f64> = g.edges().iter().map(|e| e.weight).collect();
    let threshold = outlier_threshold(&weights);
    g.retain(|e| e.reciprocal || e.weight <= threshold)
}

/// Unpruned knn-graph at the smallest `k` that connects it, scanning upward
/// from `k = 1`.
pub fn min_k_connected_graph(ps: &PointSet) -> Result<(WeightedGraph, usize)> {
    min_k_connected_graph_with(ps, Execution::default())
}

pub fn min_k_connected_graph_with(
    ps: &PointSet,
    exec: Execution,
) -> Result<(WeightedGraph, usize)> {
    let n = ps.n();
    if n < 2 {
        return Err(Error::DegenerateInput(
            "min-k-connected graph needs at least two points".into(),
        ));
    }
    // Neighbor lists are computed for a window of ranks that doubles until
    // the scan finds a connecting k.
    let mut window = 8.min(n - 1);
    loop {
        let lists = knn_lists(ps, window, exec)?;
        let mut ds = DisjointSets::new(n);
        for k in 1..=window {
            for (v, list) in lists.iter().enumerate() {
                ds.union(v, list[k - 1]);
            }
            if ds.num_sets() == 1 {
                let prefix: Vec<Vec<usize>> = lists.iter().map(|l| l[..k].to_vec()).collect();
                let (g, _) = graph_from_lists(ps, &prefix);
                return Ok((g, k));
            }
        }
        if window == n - 1 {
            unreachable!("the complete graph is connected");
        }
        window = (window * 2).min(n - 1);
    }
}
