//! Clustering accuracy under the best one-to-one cluster/class matching.

use super::ClusterAssignment;
use crate::error::{Error, Result};

/// `counts[p][t]` = points in predicted cluster `p` with true class `t`.
pub fn confusion_matrix(predicted: &[usize], truth: &[usize]) -> Vec<Vec<usize>> {
    let p = predicted.iter().max().map_or(0, |m| m + 1);
    let t = truth.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![vec![0; t]; p];
    for (&a, &b) in predicted.iter().zip(truth) {
        counts[a][b] += 1;
    }
    counts
}

/// Maximum-weight perfect matching on a square matrix (Hungarian algorithm
/// with potentials, `O(n^3)`). Returns the total weight and `assign[row] = col`.
pub fn hungarian_max(weights: &[Vec<i64>]) -> (i64, Vec<usize>) {
    let n = weights.len();
    if n == 0 {
        return (0, Vec::new());
    }
    let max = weights.iter().flatten().copied().max().unwrap_or(0);
    // Minimize cost = max - weight; 1-based arrays, column 0 is a sentinel.
    let cost = |i: usize, j: usize| max - weights[i - 1][j - 1];
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=n {
        assign[p[j] - 1] = j - 1;
    }
    let total = (0..n).map(|i| weights[i][assign[i]]).sum();
    (total, assign)
}

/// Fraction of points whose cluster maps to their class under the best
/// injective cluster-to-class mapping.
pub fn accuracy(assignment: &ClusterAssignment, truth: &[usize]) -> Result<f64> {
    if assignment.labels.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            found: assignment.labels.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::DegenerateInput("accuracy of an empty labeling".into()));
    }
    let counts = confusion_matrix(&assignment.labels, truth);
    let size = counts.len().max(counts.first().map_or(0, Vec::len));
    let mut square = vec![vec![0i64; size]; size];
    for (p, row) in counts.iter().enumerate() {
        for (t, &c) in row.iter().enumerate() {
            square[p][t] = c as i64;
        }
    }
    let (matched, _) = hungarian_max(&square);
    Ok(matched as f64 / truth.len() as f64)
}
