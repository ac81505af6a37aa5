//! All-pairs shortest paths and the end-to-end PKNNG dissimilarity.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::connect::{connect_graph_with, resolve_mu, ConnectorConfig};
use crate::error::{Error, Result};
use crate::graph::{components, components_where, EdgeKind, WeightedGraph};
use crate::knn::{build_knn_graph_with, min_k_connected_graph_with, prune_outlier_edges};
use crate::par::Execution;
use crate::points::{DissimilarityMatrix, PointSet};

fn ensure_connected(g: &WeightedGraph) -> Result<()> {
    let labels = components_where(g, |_| true);
    if labels.count > 1 {
        return Err(Error::Disconnected {
            first: 0,
            second: 1,
        });
    }
    Ok(())
}

#[derive(Copy, Clone, PartialEq)]
struct State {
    dist: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source distances with a binary heap (lazy deletion).
pub fn dijkstra(g: &WeightedGraph, source: usize, out: &mut [f64]) {
    out.fill(f64::INFINITY);
    out[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(State {
        dist: 0.0,
        node: source,
    });
    while let Some(State { dist, node }) = heap.pop() {
        if dist > out[node] {
            continue;
        }
        for &(next, w) in g.neighbors(node) {
            let nd = dist + w;
            if nd < out[next] {
                out[next] = nd;
                heap.push(State { dist: nd, node: next });
            }
        }
    }
}

/// Array-scan Dijkstra over a dense weight matrix; `O(n^2)` per source.
fn dijkstra_dense(weights: &[f64], n: usize, source: usize, out: &mut [f64], done: &mut [bool]) {
    out.fill(f64::INFINITY);
    done.fill(false);
    out[source] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for v in 0..n {
            if !done[v] && out[v] < best {
                best = out[v];
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        let row = &weights[u * n..(u + 1) * n];
        for v in 0..n {
            let nd = best + row[v];
            if nd < out[v] {
                out[v] = nd;
            }
        }
    }
}

pub fn apsp_dijkstra(g: &WeightedGraph) -> Result<DissimilarityMatrix> {
    apsp_dijkstra_with(g, Execution::default())
}

/// One Dijkstra run per source. Graphs with more than `n^2/8` edges use the
/// array-scan variant, which beats the heap once most pairs are edges.
pub fn apsp_dijkstra_with(g: &WeightedGraph, exec: Execution) -> Result<DissimilarityMatrix> {
    let n = g.n();
    ensure_connected(g)?;
    let mut data = vec![0.0; n * n];
    if n == 0 {
        return Ok(DissimilarityMatrix::from_raw(0, data));
    }
    if g.num_edges() * 8 > n * n {
        let mut w = vec![f64::INFINITY; n * n];
        for e in g.edges() {
            w[e.i * n + e.j] = e.weight;
            w[e.j * n + e.i] = e.weight;
        }
        exec.for_each_chunk(&mut data, n, |s, row| {
            let mut done = vec![false; n];
            dijkstra_dense(&w, n, s, row, &mut done);
        });
    } else {
        exec.for_each_chunk(&mut data, n, |s, row| dijkstra(g, s, row));
    }
    symmetrize(n, &mut data);
    Ok(DissimilarityMatrix::from_raw(n, data))
}

/// Reference triple-loop implementation.
pub fn apsp_floyd_warshall(g: &WeightedGraph) -> Result<DissimilarityMatrix> {
    let n = g.n();
    ensure_connected(g)?;
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for e in g.edges() {
        d[e.i * n + e.j] = d[e.i * n + e.j].min(e.weight);
        d[e.j * n + e.i] = d[e.j * n + e.i].min(e.weight);
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if dik == f64::INFINITY {
                continue;
            }
            for j in 0..n {
                let cand = dik + d[k * n + j];
                if cand < d[i * n + j] {
                    d[i * n + j] = cand;
                }
            }
        }
    }
    symmetrize(n, &mut d);
    Ok(DissimilarityMatrix::from_raw(n, d))
}

/// Both triangles can differ in the last ulp because paths are summed in a
/// different order; keep the smaller value on both sides.
fn symmetrize(n: usize, d: &mut [f64]) {
    for i in 0..n {
        d[i * n + i] = 0.0;
        for j in i + 1..n {
            let v = d[i * n + j].min(d[j * n + i]);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
}

/// Everything produced on the way to a PKNNG matrix.
#[derive(Clone, Debug)]
pub struct PknngOutput {
    pub matrix: DissimilarityMatrix,
    /// Connected graph the distances were measured on.
    pub graph: WeightedGraph,
    /// Components of the pruned knn-graph.
    pub components: usize,
    pub mu: f64,
    pub pruned_edges: usize,
    pub added_edges: usize,
    pub clamped_duplicates: usize,
}

/// knn-graph, outlier pruning, connector edges, shortest paths.
pub fn pknng_metric(ps: &PointSet, k: usize, cfg: &ConnectorConfig) -> Result<DissimilarityMatrix> {
    pknng_metric_with(ps, k, cfg, Execution::default()).map(|o| o.matrix)
}

pub fn pknng_metric_with(
    ps: &PointSet,
    k: usize,
    cfg: &ConnectorConfig,
    exec: Execution,
) -> Result<PknngOutput> {
    let knn = build_knn_graph_with(ps, k, exec)?;
    let pruned = prune_outlier_edges(&knn.graph);
    let pruned_edges = knn.graph.num_edges() - pruned.num_edges();
    let comps = components(&pruned).count;
    let mu = resolve_mu(&pruned, ps, cfg.mu_source)?;
    let graph = connect_graph_with(&pruned, ps, cfg, exec)?;
    let added_edges = graph.edges_of_kind(EdgeKind::Added).count();
    let matrix = apsp_dijkstra_with(&graph, exec)?;
    Ok(PknngOutput {
        matrix,
        graph,
        components: comps,
        mu,
        pruned_edges,
        added_edges,
        clamped_duplicates: knn.clamped_duplicates,
    })
}

/// Geodesic distances on the min-k-connected knn-graph. Returns the matrix
/// and the `k` that was used.
pub fn min_k_metric(ps: &PointSet, exec: Execution) -> Result<(DissimilarityMatrix, usize)> {
    let (g, k) = min_k_connected_graph_with(ps, exec)?;
    Ok((apsp_dijkstra_with(&g, exec)?, k))
}
