//! Agglomerative clustering with Lance-Williams updates.

use super::{check_k, relabel_dense, ClusterAssignment, Linkage};
use crate::error::Result;
use crate::points::DissimilarityMatrix;

/// Merge the closest pair of clusters until `k` remain. Ties go to the
/// smallest `(i, j)` pair of cluster representatives; the merged cluster
/// keeps the smaller representative.
pub fn hierarchical(d: &DissimilarityMatrix, k: usize, linkage: Linkage) -> Result<ClusterAssignment> {
    check_k(d, k)?;
    let n = d.n();
    let mut dist = d.as_slice().to_vec();
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    // owner[v] = representative of the cluster holding v
    let mut owner: Vec<usize> = (0..n).collect();
    // Nearest active partner j > i for each active i.
    let mut nn = vec![(f64::INFINITY, usize::MAX); n];
    for i in 0..n {
        nn[i] = row_min(&dist, &active, n, i);
    }

    for _ in 0..n - k {
        let mut a = usize::MAX;
        let mut best = f64::INFINITY;
        for i in 0..n {
            if active[i] && nn[i].1 != usize::MAX && (a == usize::MAX || nn[i].0 < best) {
                best = nn[i].0;
                a = i;
            }
        }
        let b = nn[a].1;
        debug_assert!(a < b);

        for x in 0..n {
            if !active[x] || x == a || x == b {
                continue;
            }
            let dax = dist[a * n + x];
            let dbx = dist[b * n + x];
            let merged = match linkage {
                Linkage::Single => dax.min(dbx),
                Linkage::Complete => dax.max(dbx),
                Linkage::Average => {
                    (size[a] as f64 * dax + size[b] as f64 * dbx) / (size[a] + size[b]) as f64
                }
            };
            dist[a * n + x] = merged;
            dist[x * n + a] = merged;
        }
        active[b] = false;
        size[a] += size[b];
        for o in owner.iter_mut() {
            if *o == b {
                *o = a;
            }
        }

        nn[a] = row_min(&dist, &active, n, a);
        for x in 0..n {
            if !active[x] || x == a {
                continue;
            }
            if nn[x].1 == a || nn[x].1 == b {
                nn[x] = row_min(&dist, &active, n, x);
            } else if x < a {
                let v = dist[x * n + a];
                if v < nn[x].0 || (v == nn[x].0 && a < nn[x].1) {
                    nn[x] = (v, a);
                }
            }
        }
    }

    Ok(ClusterAssignment {
        labels: relabel_dense(&owner),
        medoids: None,
        objective: None,
    })
}

fn row_min(dist: &[f64], active: &[bool], n: usize, i: usize) -> (f64, usize) {
    let mut best = (f64::INFINITY, usize::MAX);
    for j in i + 1..n {
        if active[j] && (best.1 == usize::MAX || dist[i * n + j] < best.0) {
            best = (dist[i * n + j], j);
        }
    }
    best
}
