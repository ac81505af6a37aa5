//! Lloyd's k-means with k-means++ seeding, used on spectral embeddings.

use rand::Rng;

use crate::points::squared_euclidean;

#[derive(Clone, Debug)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub inertia: f64,
    pub iterations: usize,
}

/// Best of `restarts` runs by inertia (first run wins ties).
pub fn kmeans<R: Rng + ?Sized>(
    rows: &[Vec<f64>],
    k: usize,
    restarts: usize,
    max_iter: usize,
    rng: &mut R,
) -> KMeansResult {
    assert!(k >= 1 && k <= rows.len(), "1 <= k <= n");
    let mut best: Option<KMeansResult> = None;
    for _ in 0..restarts.max(1) {
        let run = lloyd(rows, seed_plus_plus(rows, k, rng), max_iter);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    best.expect("at least one restart")
}

fn seed_plus_plus<R: Rng + ?Sized>(rows: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = rows.len();
    let mut centers = vec![rows[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = rows.iter().map(|r| squared_euclidean(r, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut idx = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    idx = i;
                    break;
                }
                target -= w;
            }
            idx
        } else {
            rng.random_range(0..n)
        };
        centers.push(rows[pick].clone());
        let c = centers.last().expect("just pushed");
        for (i, r) in rows.iter().enumerate() {
            d2[i] = d2[i].min(squared_euclidean(r, c));
        }
    }
    centers
}

fn nearest_center(row: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let v = squared_euclidean(row, center);
        if v < best.1 {
            best = (c, v);
        }
    }
    best
}

fn lloyd(rows: &[Vec<f64>], mut centers: Vec<Vec<f64>>, max_iter: usize) -> KMeansResult {
    let n = rows.len();
    let k = centers.len();
    let dim = rows[0].len();
    let mut labels = vec![usize::MAX; n];
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        let mut changed = false;
        let mut dists = vec![0.0; n];
        for (i, r) in rows.iter().enumerate() {
            let (c, v) = nearest_center(r, &centers);
            dists[i] = v;
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, r) in rows.iter().enumerate() {
            counts[labels[i]] += 1;
            for (s, x) in sums[labels[i]].iter_mut().zip(r) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // Re-seed an empty cluster at the worst-fitted point.
                let far = (0..n)
                    .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)))
                    .expect("n >= 1");
                centers[c] = rows[far].clone();
                dists[far] = 0.0;
                labels[far] = c;
                changed = true;
            } else {
                for (x, s) in centers[c].iter_mut().zip(&sums[c]) {
                    *x = s / counts[c] as f64;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut inertia = 0.0;
    for (i, r) in rows.iter().enumerate() {
        let (c, v) = nearest_center(r, &centers);
        labels[i] = c;
        inertia += v;
    }
    KMeansResult {
        labels,
        centers,
        inertia,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    #[test]
    fn separates_obvious_groups() {
        let rows: Vec<Vec<f64>> = [0.0, 0.1, 0.2, 5.0, 5.1, 5.2]
            .iter()
            .map(|&x| vec![x, 0.0])
            .collect();
        let r = kmeans(&rows, 2, 10, 300, &mut SeededRng::new(3));
        assert_eq!(r.labels[0], r.labels[2]);
        assert_eq!(r.labels[3], r.labels[5]);
        assert_ne!(r.labels[0], r.labels[3]);
        assert!((r.inertia - 0.04).abs() < 1e-9);
    }

    #[test]
    fn identical_rows() {
        let rows = vec![vec![1.0]; 5];
        let r = kmeans(&rows, 2, 3, 300, &mut SeededRng::new(0));
        assert_eq!(r.inertia, 0.0);
    }
}
