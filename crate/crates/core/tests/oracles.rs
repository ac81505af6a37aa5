mod common;

use common::*;
use pknng::data::{embed, generate, DataConstants, DatasetSpec, Embedding, Family, Noise, SwissRoll};
use pknng::{PointSet, SeededRng};
use proptest::prelude::*;

fn pass(r: Check) -> Result<(), TestCaseError> {
    r.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn dijkstra_matches_floyd(seed in any::<u64>()) {
        pass(check_dijkstra_floyd(seed))?;
    }

    #[test]
    fn floyd_matches_path_enumeration(seed in any::<u64>()) {
        pass(check_floyd_paths(seed))?;
    }

    #[test]
    fn knn_matches_sorting(seed in any::<u64>()) {
        pass(check_knn(seed))?;
    }

    #[test]
    fn accuracy_matches_permutations(seed in any::<u64>()) {
        pass(check_accuracy(seed))?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn pam_is_swap_optimal(seed in any::<u64>()) {
        pass(check_pam_local(seed))?;
    }

    #[test]
    fn pam_single_medoid_is_exact(seed in any::<u64>(), n in 2usize..=12) {
        let d = random_euclidean(&mut SeededRng::new(seed), n);
        let m = pknng::cluster::pam(&d, 1).unwrap().medoids.unwrap();
        let got = pknng::cluster::pam_objective(&d, &m);
        prop_assert!((got - exhaustive_medoid_cost(&d, 1)).abs() <= 1e-12);
    }

    #[test]
    fn single_linkage_is_mst_cut(seed in any::<u64>()) {
        pass(check_single_linkage_mst(seed))?;
    }

    #[test]
    fn pknng_is_a_metric(seed in any::<u64>()) {
        pass(check_metric_axioms(seed))?;
    }

    #[test]
    fn connectors_structure(seed in any::<u64>()) {
        pass(check_structure(seed))?;
    }

    #[test]
    fn rotation_preserves_distances(seed in any::<u64>(), n in 3usize..40) {
        let mut rng = SeededRng::new(seed);
        let ps = random_points(&mut rng, n, 2);
        let c = DataConstants::default();
        let out = embed(&ps, Embedding::Rot10dNoise, Some(0.0), &c, &mut rng).unwrap();
        let rolled = embed(&ps, Embedding::Swiss3d, None, &c, &mut SeededRng::new(seed)).unwrap();
        prop_assert_eq!(out.dim(), 10);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (out.dist(i, j), rolled.dist(i, j));
                prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0), "({}, {}) {} vs {}", i, j, a, b);
            }
        }
    }
}

/// Trapezoid-free check: Simpson's rule on |d position / d theta|.
#[test]
fn swiss_roll_arc_length_matches_quadrature() {
    let roll = SwissRoll::fit(-3.0, 5.0, 1.5, 3.0 * std::f64::consts::PI).unwrap();
    let speed = |t: f64| {
        let h = 1e-6;
        let (a, b) = (roll.position(t - h), roll.position(t + h));
        ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt() / (2.0 * h)
    };
    for &end in &[1.5, 2.0, 4.0, 7.0, 1.5 + 3.0 * std::f64::consts::PI] {
        let steps = 20_000;
        let h = (end - 1.5) / steps as f64;
        let mut s = speed(1.5) + speed(end);
        for i in 1..steps {
            s += speed(1.5 + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let numeric = s * h / 3.0;
        assert!((roll.arc_length(end) - numeric).abs() <= 1e-6, "{end}: {} vs {numeric}", roll.arc_length(end));
        let x = -3.0 + numeric;
        assert!((roll.theta_for(x) - end).abs() <= 1e-6);
    }
    assert!((roll.arc_length(1.5 + 3.0 * std::f64::consts::PI) - 8.0).abs() <= 1e-9);
}

#[test]
fn central_disk_is_uniform_by_area() {
    let c = DataConstants::default();
    let spec = DatasetSpec {
        n_per_cluster: 4000,
        ..DatasetSpec::new(Family::ThreeRings, Noise::Low, Embedding::Plane2d, 11)
    };
    let ps = generate(&spec, &c).unwrap();
    let labels = ps.labels().unwrap();
    let radii: Vec<f64> = (0..ps.n())
        .filter(|&i| labels[i] == 0)
        .map(|i| ps.point(i).iter().map(|x| x * x).sum::<f64>().sqrt() / c.rings_disk_radius)
        .collect();
    // Uniform by area: P(r <= t) = t^2.
    for t in [0.25, 0.5, 0.75] {
        let frac = radii.iter().filter(|&&r| r <= t).count() as f64 / radii.len() as f64;
        let sd = (t * t * (1.0 - t * t) / radii.len() as f64).sqrt();
        assert!((frac - t * t).abs() <= 4.0 * sd, "t={t}: {frac}");
    }
    assert!(radii.iter().all(|&r| r <= 1.0));
}

#[test]
fn embeddings_keep_points_distinct() {
    let c = DataConstants::default();
    for family in [Family::TwoArcs, Family::ThreeSpirals, Family::ThreeRings, Family::FourGaussians] {
        for embedding in Embedding::ALL {
            let ps: PointSet = generate(&DatasetSpec::new(family, Noise::Low, embedding, 5), &c).unwrap();
            let mut rows: Vec<Vec<u64>> = ps.points().map(|p| p.iter().map(|x| x.to_bits()).collect()).collect();
            rows.sort();
            rows.dedup();
            assert_eq!(rows.len(), ps.n(), "{family:?} {embedding:?}");
        }
    }
}
