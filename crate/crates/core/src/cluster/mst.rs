//! Minimum-spanning-tree clustering (cut the longest tree edges).

use super::{check_k, ClusterAssignment};
use crate::error::Result;
use crate::graph::DisjointSets;
use crate::points::DissimilarityMatrix;

/// Prim's algorithm on the complete graph of `d`, `O(n^2)`. Returns
/// `(u, v, weight)` with `u < v`.
pub fn minimum_spanning_tree(d: &DissimilarityMatrix) -> Vec<(usize, usize, f64)> {
    let n = d.n();
    if n < 2 {
        return Vec::new();
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![(f64::INFINITY, usize::MAX); n];
    let mut edges = Vec::with_capacity(n - 1);
    in_tree[0] = true;
    for (v, b) in best.iter_mut().enumerate().skip(1) {
        *b = (d.get(0, v), 0);
    }
    for _ in 1..n {
        let mut u = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (u == usize::MAX || best[v].0 < best[u].0) {
                u = v;
            }
        }
        in_tree[u] = true;
        let (w, from) = best[u];
        edges.push((from.min(u), from.max(u), w));
        let row = d.row(u);
        for v in 0..n {
            if !in_tree[v] && row[v] < best[v].0 {
                best[v] = (row[v], u);
            }
        }
    }
    edges
}

/// Drop the `k - 1` heaviest MST edges; the remaining components are the
/// clusters, numbered by smallest member.
pub fn mst_cluster(d: &DissimilarityMatrix, k: usize) -> Result<ClusterAssignment> {
    check_k(d, k)?;
    let mut edges = minimum_spanning_tree(d);
    edges.sort_by(|a, b| a.2.total_cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let keep = edges.len() - (k - 1);
    let mut ds = DisjointSets::new(d.n());
    for &(u, v, _) in &edges[..keep] {
        ds.union(u, v);
    }
    Ok(ClusterAssignment {
        labels: ds.labeling(),
        medoids: None,
        objective: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> DissimilarityMatrix {
        DissimilarityMatrix::from_fn(xs.len(), |i, j| (xs[i] - xs[j]).abs()).unwrap()
    }

    #[test]
    fn chain_split() {
        let d = line(&[0.0, 1.0, 2.0, 10.0, 11.0, 12.0]);
        assert_eq!(mst_cluster(&d, 2).unwrap().labels, vec![0, 0, 0, 1, 1, 1]);
        assert_eq!(mst_cluster(&d, 1).unwrap().labels, vec![0; 6]);
        assert_eq!(mst_cluster(&d, 6).unwrap().k(), 6);
    }

    #[test]
    fn tree_weight_of_a_line() {
        let d = line(&[0.0, 2.0, 3.0, 7.0]);
        let t = minimum_spanning_tree(&d);
        assert_eq!(t.len(), 3);
        assert_eq!(t.iter().map(|e| e.2).sum::<f64>(), 7.0);
    }
}
