//! Planar samplers for the synthetic datasets. Points are emitted class by
//! class, `n_per_cluster` each.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{DataConstants, DatasetSpec, Family};
use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::rng::SeededRng;

fn check_family(spec: &DatasetSpec, family: Family) -> Result<()> {
    if spec.family != family {
        return Err(Error::param(format!(
            "spec is for {}, not {family}",
            spec.family
        )));
    }
    spec.validate()
}

fn normal(sigma: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, sigma).map_err(|e| Error::param(format!("noise sigma {sigma}: {e}")))
}

fn finish(rows: Vec<[f64; 2]>, labels: Vec<usize>, seed: u64) -> Result<PointSet> {
    Ok(PointSet::from_rows(&rows)?.with_labels(labels)?.with_seed(seed))
}

/// Two interleaved half circles of radius `arcs_radius`: arc 0 is centered
/// at the origin and spans angles `[0, pi]`; arc 1 is its point reflection,
/// centered at `(r, r/2)`. Radius jitter is `N(0, sigma^2)`.
pub fn gen_two_arcs(spec: &DatasetSpec, c: &DataConstants) -> Result<PointSet> {
    check_family(spec, Family::TwoArcs)?;
    let r0 = c.arcs_radius;
    let noise = normal(spec.noise.sigma(c.arcs_noise))?;
    let mut rng = SeededRng::with_stream(spec.seed, 0);
    let mut rows = Vec::with_capacity(2 * spec.n_per_cluster);
    let mut labels = Vec::with_capacity(rows.capacity());
    for class in 0..2 {
        for _ in 0..spec.n_per_cluster {
            let t = rng.random::<f64>() * PI;
            let r = r0 + noise.sample(&mut rng);
            let p = if class == 0 {
                [r * t.cos(), r * t.sin()]
            } else {
                [r0 - r * t.cos(), 0.5 * r0 - r * t.sin()]
            };
            rows.push(p);
            labels.push(class);
        }
    }
    finish(rows, labels, spec.seed)
}

/// Three Archimedean spirals `r = a * theta` rotated by `0, 2pi/3, 4pi/3`.
/// `theta` is uniform on `[spiral_theta_min, spiral_theta_max]`, so spatial
/// density falls off with the radius. Radial noise is `N(0, (sigma * r)^2)`.
pub fn gen_three_spirals(spec: &DatasetSpec, c: &DataConstants) -> Result<PointSet> {
    check_family(spec, Family::ThreeSpirals)?;
    let frac = spec.noise.sigma(c.spiral_noise);
    let unit = normal(1.0)?;
    let mut rng = SeededRng::with_stream(spec.seed, 0);
    let mut rows = Vec::with_capacity(3 * spec.n_per_cluster);
    let mut labels = Vec::with_capacity(rows.capacity());
    for class in 0..3 {
        let phase = class as f64 * 2.0 * PI / 3.0;
        for _ in 0..spec.n_per_cluster {
            let theta = rng.random_range(c.spiral_theta_min..c.spiral_theta_max);
            let r0 = c.spiral_a * theta;
            let r = r0 + frac * r0 * unit.sample(&mut rng);
            let ang = theta + phase;
            rows.push([r * ang.cos(), r * ang.sin()]);
            labels.push(class);
        }
    }
    finish(rows, labels, spec.seed)
}

/// Uniform disk (class 0) inside two noisy rings, each cut into two halves
/// by angular gaps of `rings_gap`: middle ring halves are classes 1 and 2,
/// outer ring halves 3 and 4.
pub fn gen_three_rings(spec: &DatasetSpec, c: &DataConstants) -> Result<PointSet> {
    check_family(spec, Family::ThreeRings)?;
    let noise = normal(spec.noise.sigma(c.rings_noise))?;
    let gap = c.rings_gap;
    if !(0.0..PI).contains(&gap) {
        return Err(Error::param(format!("ring gap {gap} must lie in [0, pi)")));
    }
    let mut rng = SeededRng::with_stream(spec.seed, 0);
    let n = spec.n_per_cluster;
    let mut rows = Vec::with_capacity(5 * n);
    let mut labels = Vec::with_capacity(5 * n);
    for _ in 0..n {
        let r = c.rings_disk_radius * rng.random::<f64>().sqrt();
        let a = rng.random::<f64>() * 2.0 * PI;
        rows.push([r * a.cos(), r * a.sin()]);
        labels.push(0);
    }
    for (ring, radius) in [c.rings_middle_radius, c.rings_outer_radius].into_iter().enumerate() {
        for half in 0..2 {
            let lo = half as f64 * PI + gap / 2.0;
            let hi = (half + 1) as f64 * PI - gap / 2.0;
            for _ in 0..n {
                let a = rng.random_range(lo..hi);
                let r = radius + noise.sample(&mut rng);
                rows.push([r * a.cos(), r * a.sin()]);
                labels.push(1 + 2 * ring + half);
            }
        }
    }
    finish(rows, labels, spec.seed)
}

/// Four isotropic Gaussians on the corners of a square. Classes 0 and 3
/// (one diagonal) use `gauss_sigma_small`, classes 1 and 2 the larger
/// deviation.
pub fn gen_four_gaussians(spec: &DatasetSpec, c: &DataConstants) -> Result<PointSet> {
    check_family(spec, Family::FourGaussians)?;
    let s = c.gauss_separation;
    let small = c.gauss_sigma_small;
    let large = small * c.gauss_sigma_ratio;
    let centers = [([0.0, 0.0], small), ([s, 0.0], large), ([0.0, s], large), ([s, s], small)];
    let mut rng = SeededRng::with_stream(spec.seed, 0);
    let mut rows = Vec::with_capacity(4 * spec.n_per_cluster);
    let mut labels = Vec::with_capacity(rows.capacity());
    for (class, (mean, sigma)) in centers.iter().enumerate() {
        let g = normal(*sigma)?;
        for _ in 0..spec.n_per_cluster {
            rows.push([mean[0] + g.sample(&mut rng), mean[1] + g.sample(&mut rng)]);
            labels.push(class);
        }
    }
    finish(rows, labels, spec.seed)
}

/// Centers used by [`gen_four_gaussians`], for tests and diagnostics.
#[cfg(test)]
pub(crate) fn gaussian_centers(c: &DataConstants) -> [([f64; 2], f64); 4] {
    let s = c.gauss_separation;
    let small = c.gauss_sigma_small;
    let large = small * c.gauss_sigma_ratio;
    [([0.0, 0.0], small), ([s, 0.0], large), ([0.0, s], large), ([s, s], small)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Embedding, Noise};

    fn spec(family: Family, noise: Noise, seed: u64) -> DatasetSpec {
        DatasetSpec::new(family, noise, Embedding::Plane2d, seed)
    }

    #[test]
    fn arcs_without_noise_lie_on_circles() {
        let c = DataConstants::default();
        let ps = gen_two_arcs(&spec(Family::TwoArcs, Noise::Sigma(0.0), 3), &c).unwrap();
        let labels = ps.labels().unwrap();
        for i in 0..ps.n() {
            let p = ps.point(i);
            let center = if labels[i] == 0 { [0.0, 0.0] } else { [1.0, 0.5] };
            let r = ((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2)).sqrt();
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn determinism_and_sizes() {
        let c = DataConstants::default();
        for family in [Family::TwoArcs, Family::ThreeSpirals, Family::ThreeRings, Family::FourGaussians] {
            let s = spec(family, Noise::Medium, 11);
            let a = crate::data::generate(&s, &c).unwrap();
            let b = crate::data::generate(&s, &c).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.num_classes(), family.class_count());
            let mut counts = vec![0; family.class_count()];
            for &l in a.labels().unwrap() {
                counts[l] += 1;
            }
            assert!(counts.iter().all(|&k| k == s.n_per_cluster), "{family}: {counts:?}");
            let other = crate::data::generate(&spec(family, Noise::Medium, 12), &c).unwrap();
            assert_ne!(a, other);
        }
    }

    #[test]
    fn spirals_without_noise_follow_r_equals_a_theta() {
        let c = DataConstants::default();
        let ps = gen_three_spirals(&spec(Family::ThreeSpirals, Noise::Sigma(0.0), 5), &c).unwrap();
        let labels = ps.labels().unwrap();
        for i in 0..ps.n() {
            let p = ps.point(i);
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let theta = r / c.spiral_a;
            assert!(theta >= c.spiral_theta_min - 1e-9 && theta <= c.spiral_theta_max + 1e-9);
            let phase = labels[i] as f64 * 2.0 * PI / 3.0;
            let expected = [r * (theta + phase).cos(), r * (theta + phase).sin()];
            assert!((p[0] - expected[0]).abs() < 1e-9 && (p[1] - expected[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn rings_radii_and_gaps() {
        let c = DataConstants::default();
        let ps = gen_three_rings(&spec(Family::ThreeRings, Noise::Sigma(0.0), 9), &c).unwrap();
        let labels = ps.labels().unwrap();
        for i in 0..ps.n() {
            let p = ps.point(i);
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let a = p[1].atan2(p[0]).rem_euclid(2.0 * PI);
            match labels[i] {
                0 => assert!(r <= c.rings_disk_radius),
                l => {
                    let want = if l <= 2 { c.rings_middle_radius } else { c.rings_outer_radius };
                    assert!((r - want).abs() < 1e-12);
                    // Gaps are centered on angles 0 and pi.
                    let off = a.min(2.0 * PI - a).min((a - PI).abs());
                    assert!(off >= c.rings_gap / 2.0 - 1e-12, "angle {a} inside a gap");
                    let half = usize::from(a > PI);
                    assert_eq!((l - 1) % 2, half);
                }
            }
        }
    }

    #[test]
    fn gaussian_means_are_recoverable() {
        // Each per-class, per-axis mean should sit within 3 sigma/sqrt(n) of
        // its center; at that level about 0.27% of checks miss by chance.
        let c = DataConstants::default();
        let (mut checks, mut misses) = (0, 0);
        for seed in 0..50 {
            let ps = gen_four_gaussians(&spec(Family::FourGaussians, Noise::Low, seed), &c).unwrap();
            let labels = ps.labels().unwrap();
            for (class, (mean, sigma)) in gaussian_centers(&c).iter().enumerate() {
                let pts: Vec<&[f64]> = (0..ps.n()).filter(|&i| labels[i] == class).map(|i| ps.point(i)).collect();
                let m = pts.len() as f64;
                for d in 0..2 {
                    let avg = pts.iter().map(|p| p[d]).sum::<f64>() / m;
                    checks += 1;
                    if (avg - mean[d]).abs() >= 3.0 * sigma / m.sqrt() {
                        misses += 1;
                    }
                }
            }
        }
        assert_eq!(checks, 400);
        assert!(misses <= 5, "{misses} of {checks} means outside 3 sigma/sqrt(n)");
    }

    #[test]
    fn wrong_family_is_rejected() {
        let c = DataConstants::default();
        assert!(gen_two_arcs(&spec(Family::ThreeRings, Noise::Low, 1), &c).is_err());
    }
}
