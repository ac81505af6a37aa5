//! Partitioning Around Medoids: greedy BUILD, then steepest-descent SWAP.

use super::{check_k, ClusterAssignment};
use crate::error::Result;
use crate::points::DissimilarityMatrix;

/// `sum_i min_m d[i][m]`.
pub fn pam_objective(d: &DissimilarityMatrix, medoids: &[usize]) -> f64 {
    (0..d.n())
        .map(|i| medoids.iter().map(|&m| d.get(i, m)).fold(f64::INFINITY, f64::min))
        .sum()
}

/// Nearest and second-nearest medoid bookkeeping.
struct Cache {
    /// Position in `medoids` of the nearest medoid.
    nearest: Vec<usize>,
    dn: Vec<f64>,
    ds: Vec<f64>,
}

impl Cache {
    fn build(d: &DissimilarityMatrix, medoids: &[usize]) -> Self {
        let n = d.n();
        let mut c = Cache {
            nearest: vec![0; n],
            dn: vec![f64::INFINITY; n],
            ds: vec![f64::INFINITY; n],
        };
        for i in 0..n {
            for (pos, &m) in medoids.iter().enumerate() {
                let v = d.get(i, m);
                if v < c.dn[i] {
                    c.ds[i] = c.dn[i];
                    c.dn[i] = v;
                    c.nearest[i] = pos;
                } else if v < c.ds[i] {
                    c.ds[i] = v;
                }
            }
        }
        c
    }
}

pub fn pam(d: &DissimilarityMatrix, k: usize) -> Result<ClusterAssignment> {
    check_k(d, k)?;
    let n = d.n();
    let mut medoids = build(d, k);
    let mut is_medoid = vec![false; n];
    for &m in &medoids {
        is_medoid[m] = true;
    }

    let mut objective = pam_objective(d, &medoids);
    let mut delta = vec![0.0; k];
    loop {
        let cache = Cache::build(d, &medoids);
        // (delta, medoid point, candidate point, medoid position)
        let mut best: Option<(f64, usize, usize, usize)> = None;
        for h in 0..n {
            if is_medoid[h] {
                continue;
            }
            let row = d.row(h);
            // Gain shared by every removal: points that move to h.
            let mut common = 0.0;
            delta.fill(0.0);
            for i in 0..n {
                let dih = row[i];
                let dn = cache.dn[i];
                if dih < dn {
                    common += dih - dn;
                }
                // Correction for points whose nearest medoid is removed.
                let own = dih.min(cache.ds[i]) - dn - (dih - dn).min(0.0);
                delta[cache.nearest[i]] += own;
            }
            for (pos, &m) in medoids.iter().enumerate() {
                let total = common + delta[pos];
                let better = match best {
                    None => true,
                    Some((bd, bm, bh, _)) => total < bd || (total == bd && (m, h) < (bm, bh)),
                };
                if better {
                    best = Some((total, m, h, pos));
                }
            }
        }
        let Some((_, m, h, pos)) = best else { break };
        let mut trial = medoids.clone();
        trial[pos] = h;
        let trial_objective = pam_objective(d, &trial);
        // The exact objective decides acceptance so rounding in the
        // incremental deltas cannot cause cycling.
        if trial_objective < objective {
            is_medoid[m] = false;
            is_medoid[h] = true;
            medoids = trial;
            objective = trial_objective;
        } else {
            break;
        }
    }

    let mut labels = Cache::build(d, &medoids).nearest;
    // A medoid always belongs to its own cluster, even when a duplicate
    // point makes another medoid equally near.
    for (pos, &m) in medoids.iter().enumerate() {
        labels[m] = pos;
    }
    Ok(ClusterAssignment {
        labels,
        medoids: Some(medoids),
        objective: Some(objective),
    })
}

fn build(d: &DissimilarityMatrix, k: usize) -> Vec<usize> {
    let n = d.n();
    let mut medoids = Vec::with_capacity(k);
    let mut chosen = vec![false; n];
    // First medoid: smallest total dissimilarity.
    let first = (0..n)
        .map(|j| (d.row(j).iter().sum::<f64>(), j))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, j)| j)
        .expect("n >= 1");
    medoids.push(first);
    chosen[first] = true;
    let mut dn: Vec<f64> = d.row(first).to_vec();
    while medoids.len() < k {
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for c in 0..n {
            if chosen[c] {
                continue;
            }
            let row = d.row(c);
            let gain: f64 = (0..n).map(|i| (dn[i] - row[i]).max(0.0)).sum();
            if gain > best.0 {
                best = (gain, c);
            }
        }
        let c = best.1;
        medoids.push(c);
        chosen[c] = true;
        for (i, v) in d.row(c).iter().enumerate() {
            if *v < dn[i] {
                dn[i] = *v;
            }
        }
    }
    medoids
}
