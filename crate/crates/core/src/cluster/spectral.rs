//! Normalized spectral clustering with a Gaussian kernel.
//!
//! Affinity `A_ij = exp(-d_ij^2 / (2 sigma^2))` with a zero diagonal and
//! `sigma = sigma_factor * mean(d)`. The `k` leading eigenvectors of
//! `D^-1/2 A D^-1/2` (the trailing ones of the symmetric normalized
//! Laplacian) form an embedding whose rows are scaled to unit length and
//! clustered with k-means.

use nalgebra::{DMatrix, SymmetricEigen};

use super::kmeans::kmeans;
use super::{check_k, relabel_dense, ClusterAssignment};
use crate::error::{Error, Result};
use crate::points::DissimilarityMatrix;
use crate::rng::SeededRng;

pub const SPECTRAL_RESTARTS: usize = 10;
pub const KMEANS_MAX_ITER: usize = 300;

/// `D^-1/2 A D^-1/2` as a row-major `n x n` buffer. Rows of isolated points
/// (zero degree) stay zero.
pub fn normalized_affinity(d: &DissimilarityMatrix, sigma_factor: f64) -> Result<Vec<f64>> {
    if !(sigma_factor > 0.0) {
        return Err(Error::param(format!("sigma factor {sigma_factor} must be positive")));
    }
    let n = d.n();
    let sigma = sigma_factor * d.mean_off_diagonal();
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::DegenerateInput(format!(
            "kernel width {sigma} from a matrix with mean distance {}",
            d.mean_off_diagonal()
        )));
    }
    let scale = 1.0 / (2.0 * sigma * sigma);
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = (-d.get(i, j).powi(2) * scale).exp();
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    let inv_sqrt_deg: Vec<f64> = (0..n)
        .map(|i| {
            let deg: f64 = a[i * n..(i + 1) * n].iter().sum();
            if deg > 0.0 {
                1.0 / deg.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] *= inv_sqrt_deg[i] * inv_sqrt_deg[j];
        }
    }
    Ok(a)
}

/// Eigenpairs of the `k` largest eigenvalues of a symmetric matrix, in
/// decreasing eigenvalue order. Each vector is returned as a column.
pub fn top_eigenvectors(m: &[f64], n: usize, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mat = DMatrix::from_row_slice(n, n, m);
    let eig = SymmetricEigen::try_new(mat, f64::EPSILON, 0)
        .ok_or_else(|| Error::EigenFailure(format!("no convergence for a {n}x{n} matrix")))?;
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure("non-finite eigenvalue".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = order[..k].iter().map(|&c| eig.eigenvalues[c]).collect();
    let vectors = order[..k]
        .iter()
        .map(|&c| eig.eigenvectors.column(c).iter().copied().collect())
        .collect();
    Ok((values, vectors))
}

/// Row-normalized spectral embedding, one `k`-vector per point.
pub fn spectral_embedding(d: &DissimilarityMatrix, k: usize, sigma_factor: f64) -> Result<Vec<Vec<f64>>> {
    check_k(d, k)?;
    let n = d.n();
    let m = normalized_affinity(d, sigma_factor)?;
    let (_, vectors) = top_eigenvectors(&m, n, k)?;
    Ok((0..n)
        .map(|i| {
            let row: Vec<f64> = vectors.iter().map(|v| v[i]).collect();
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter().map(|x| x / norm).collect()
            } else {
                row
            }
        })
        .collect())
}

pub fn spectral(
    d: &DissimilarityMatrix,
    k: usize,
    sigma_factor: f64,
    rng: &mut SeededRng,
) -> Result<ClusterAssignment> {
    check_k(d, k)?;
    if k == 1 {
        return Ok(ClusterAssignment::from_labels(&vec![0; d.n()]));
    }
    let rows = spectral_embedding(d, k, sigma_factor)?;
    let km = kmeans(&rows, k, SPECTRAL_RESTARTS, KMEANS_MAX_ITER, rng);
    Ok(ClusterAssignment {
        labels: relabel_dense(&km.labels),
        medoids: None,
        objective: Some(km.inertia),
    })
}
