//! Swiss-roll and rotated high-dimensional embeddings of planar data.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, Normal, StandardNormal};

use super::{DataConstants, Embedding};
use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::rng::SeededRng;

/// Archimedean spiral `r = b * theta` scaled so that its arc length over
/// `[theta_start, theta_start + span]` equals `width`. A planar `x` is
/// rolled onto arc-length `x - x_min`, so distances measured inside the
/// surface are those of the plane.
#[derive(Clone, Copy, Debug)]
pub struct SwissRoll {
    pub b: f64,
    pub theta_start: f64,
    pub x_min: f64,
    pub width: f64,
}

/// Antiderivative helper: arc length from 0 to `theta` of `r = theta` is
/// `F(theta) / 2`.
fn f_arc(theta: f64) -> f64 {
    theta * (1.0 + theta * theta).sqrt() + theta.asinh()
}

impl SwissRoll {
    pub fn fit(x_min: f64, x_max: f64, theta_start: f64, span: f64) -> Result<Self> {
        let width = x_max - x_min;
        if !(width > 0.0) || !(span > 0.0) || !(theta_start >= 0.0) {
            return Err(Error::DegenerateInput(format!(
                "cannot roll x-range [{x_min}, {x_max}] over span {span}"
            )));
        }
        let b = 2.0 * width / (f_arc(theta_start + span) - f_arc(theta_start));
        Ok(Self {
            b,
            theta_start,
            x_min,
            width,
        })
    }

    /// Arc length from the roll's start to angle `theta`.
    pub fn arc_length(&self, theta: f64) -> f64 {
        0.5 * self.b * (f_arc(theta) - f_arc(self.theta_start))
    }

    /// Angle at which the arc length reaches `x - x_min`.
    pub fn theta_for(&self, x: f64) -> f64 {
        let target = 2.0 * (x - self.x_min) / self.b + f_arc(self.theta_start);
        // F is convex and increasing for theta >= 0; Newton from the right
        // of the root converges monotonically.
        let mut theta = self.theta_start.max(1.0);
        while f_arc(theta) < target {
            theta *= 2.0;
        }
        for _ in 0..100 {
            let step = (f_arc(theta) - target) / (2.0 * (1.0 + theta * theta).sqrt());
            theta -= step;
            if step.abs() <= 1e-15 * theta.max(1.0) {
                break;
            }
        }
        theta
    }

    pub fn position(&self, theta: f64) -> [f64; 2] {
        let r = self.b * theta;
        [r * theta.cos(), r * theta.sin()]
    }

    /// Unit normal of the spiral in the rolled plane at `theta`.
    pub fn normal(&self, theta: f64) -> [f64; 2] {
        let tx = theta.cos() - theta * theta.sin();
        let tz = theta.sin() + theta * theta.cos();
        let len = (tx * tx + tz * tz).sqrt();
        [tz / len, -tx / len]
    }
}

/// `(X, y, Z)` for a planar point under `roll`.
pub fn swiss_roll_point(roll: &SwissRoll, x: f64, y: f64) -> [f64; 3] {
    let theta = roll.theta_for(x);
    let [px, pz] = roll.position(theta);
    [px, y, pz]
}

/// Haar-random rotation in `dim` dimensions: QR of a Gaussian matrix with
/// the column signs fixed by `diag(R) > 0`, then one column flipped if
/// needed so that `det = +1`.
pub fn random_rotation(dim: usize, rng: &mut SeededRng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..dim {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

fn diameter(ps: &PointSet) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..ps.n() {
        for j in i + 1..ps.n() {
            best = best.max(ps.dist(i, j));
        }
    }
    best
}

fn relabel(coords: Vec<f64>, dim: usize, src: &PointSet) -> Result<PointSet> {
    let out = PointSet::new(coords, dim)?;
    let out = match src.labels() {
        Some(l) => out.with_labels(l.to_vec())?,
        None => out,
    };
    Ok(match src.seed() {
        Some(s) => out.with_seed(s),
        None => out,
    })
}

/// Apply an embedding. `noise_sigma = None` uses
/// `embed_noise_fraction * diameter(Swiss3d(ps))`.
pub fn embed(
    ps: &PointSet,
    embedding: Embedding,
    noise_sigma: Option<f64>,
    c: &DataConstants,
    rng: &mut SeededRng,
) -> Result<PointSet> {
    if embedding == Embedding::Plane2d {
        return Ok(ps.clone());
    }
    if ps.dim() != 2 {
        return Err(Error::param(format!(
            "{embedding} embedding needs 2-d input, got {}-d",
            ps.dim()
        )));
    }
    let (x_min, x_max) = ps
        .points()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[0]), hi.max(p[0])));
    let roll = SwissRoll::fit(x_min, x_max, c.swiss_theta_start, c.swiss_span)?;
    let thetas: Vec<f64> = ps.points().map(|p| roll.theta_for(p[0])).collect();
    let mut rolled = Vec::with_capacity(ps.n() * 3);
    for (p, &t) in ps.points().zip(&thetas) {
        let [px, pz] = roll.position(t);
        rolled.extend_from_slice(&[px, p[1], pz]);
    }
    let swiss = relabel(rolled, 3, ps)?;
    if embedding == Embedding::Swiss3d {
        return Ok(swiss);
    }

    let sigma = match noise_sigma {
        Some(s) => s,
        None => c.embed_noise_fraction * diameter(&swiss),
    };
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::param(format!("embedding noise {sigma}: {e}")))?;
    match embedding {
        Embedding::Swiss3dNoise => {
            let mut coords = swiss.coords().to_vec();
            for (i, &t) in thetas.iter().enumerate() {
                let [nx, nz] = roll.normal(t);
                let e = noise.sample(rng);
                coords[3 * i] += e * nx;
                coords[3 * i + 2] += e * nz;
            }
            relabel(coords, 3, ps)
        }
        Embedding::Rot10dNoise => {
            let rot = random_rotation(10, rng);
            let mut coords = Vec::with_capacity(ps.n() * 10);
            for p in swiss.points() {
                let mut v = DVector::zeros(10);
                v.rows_mut(0, 3).copy_from_slice(p);
                let out = &rot * v;
                coords.extend(out.iter().map(|x| x + noise.sample(rng)));
            }
            relabel(coords, 10, ps)
        }
        Embedding::Plane2d | Embedding::Swiss3d => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate, DatasetSpec, Family, Noise};

    fn arcs(embedding: Embedding, sigma: Option<f64>) -> PointSet {
        let mut s = DatasetSpec::new(Family::TwoArcs, Noise::Low, embedding, 17);
        s.embed_noise_sigma = sigma;
        generate(&s, &DataConstants::default()).unwrap()
    }

    #[test]
    fn swiss_keeps_roll_axis() {
        let plane = arcs(Embedding::Plane2d, None);
        let swiss = arcs(Embedding::Swiss3d, None);
        assert_eq!(swiss.dim(), 3);
        for i in 0..plane.n() {
            assert_eq!(swiss.point(i)[1], plane.point(i)[1]);
        }
    }

    #[test]
    fn theta_inverts_arc_length() {
        let roll = SwissRoll::fit(-1.0, 2.0, 1.5 * std::f64::consts::PI, 3.0 * std::f64::consts::PI).unwrap();
        for x in [-1.0, -0.3, 0.0, 0.77, 2.0] {
            let t = roll.theta_for(x);
            assert!((roll.arc_length(t) - (x + 1.0)).abs() < 1e-12);
        }
        assert!((roll.theta_for(2.0) - 4.5 * std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn rotation_is_orthogonal_with_positive_determinant() {
        let r = random_rotation(10, &mut SeededRng::new(5));
        let gram = r.transpose() * &r;
        let eye = DMatrix::<f64>::identity(10, 10);
        assert!((gram - eye).abs().max() < 1e-9);
        assert!((r.determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rotation_preserves_distances_without_noise() {
        let swiss = arcs(Embedding::Swiss3d, None);
        let rot = arcs(Embedding::Rot10dNoise, Some(0.0));
        assert_eq!(rot.dim(), 10);
        for i in (0..swiss.n()).step_by(7) {
            for j in (0..swiss.n()).step_by(5) {
                assert!((swiss.dist(i, j) - rot.dist(i, j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn surface_noise_moves_along_the_normal() {
        let swiss = arcs(Embedding::Swiss3d, None);
        let noisy = arcs(Embedding::Swiss3dNoise, Some(0.05));
        let mut moved = 0;
        for i in 0..swiss.n() {
            let (a, b) = (swiss.point(i), noisy.point(i));
            assert_eq!(a[1], b[1]);
            if (a[0] - b[0]).abs() + (a[2] - b[2]).abs() > 0.0 {
                moved += 1;
            }
        }
        assert!(moved > swiss.n() / 2);
    }

    #[test]
    fn swiss_rejects_non_planar_input() {
        let ps = PointSet::from_rows(&[[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]]).unwrap();
        let c = DataConstants::default();
        assert!(embed(&ps, Embedding::Swiss3d, None, &c, &mut SeededRng::new(1)).is_err());
        assert_eq!(embed(&ps, Embedding::Plane2d, None, &c, &mut SeededRng::new(1)).unwrap(), ps);
    }
}
