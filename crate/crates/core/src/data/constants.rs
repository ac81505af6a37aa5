use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Family;

/// Every numeric default behind the synthetic datasets and embeddings.
/// Serialized verbatim into experiment configs; bump `version` when a
/// default changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DataConstants {
    pub version: u32,

    pub arcs_radius: f64,
    /// Radial noise sigma at low, medium, high.
    pub arcs_noise: [f64; 3],

    pub spiral_a: f64,
    pub spiral_theta_min: f64,
    pub spiral_theta_max: f64,
    /// Radial noise as a fraction of the radius.
    pub spiral_noise: [f64; 3],

    pub rings_disk_radius: f64,
    pub rings_middle_radius: f64,
    pub rings_outer_radius: f64,
    /// Angular gap (radians) between the two halves of each ring.
    pub rings_gap: f64,
    pub rings_noise: [f64; 3],

    pub gauss_sigma_small: f64,
    /// Ratio of the large to the small deviation.
    pub gauss_sigma_ratio: f64,
    /// Side of the square whose corners hold the means.
    pub gauss_separation: f64,

    /// Spiral angle where the roll starts.
    pub swiss_theta_start: f64,
    /// Angular extent of the roll.
    pub swiss_span: f64,
    /// Embedding noise sigma as a fraction of the rolled data's diameter.
    pub embed_noise_fraction: f64,

    pub n_per_cluster_arcs: usize,
    pub n_per_cluster_spirals: usize,
    pub n_per_cluster_rings: usize,
    pub n_per_cluster_gaussians: usize,
}

impl Default for DataConstants {
    fn default() -> Self {
        Self {
            version: 1,
            arcs_radius: 1.0,
            arcs_noise: [0.05, 0.12, 0.20],
            spiral_a: 1.0,
            spiral_theta_min: PI / 2.0,
            spiral_theta_max: 3.0 * PI,
            spiral_noise: [0.02, 0.05, 0.08],
            rings_disk_radius: 1.0,
            rings_middle_radius: 2.2,
            rings_outer_radius: 3.4,
            rings_gap: 0.15,
            rings_noise: [0.08, 0.16, 0.24],
            gauss_sigma_small: 0.5,
            gauss_sigma_ratio: 3.0,
            gauss_separation: 10.0,
            swiss_theta_start: 1.5 * PI,
            swiss_span: 3.0 * PI,
            embed_noise_fraction: 0.01,
            n_per_cluster_arcs: 100,
            n_per_cluster_spirals: 300,
            n_per_cluster_rings: 200,
            n_per_cluster_gaussians: 100,
        }
    }
}

impl DataConstants {
    pub fn default_n_per_cluster(&self, family: Family) -> usize {
        match family {
            Family::TwoArcs => self.n_per_cluster_arcs,
            Family::ThreeSpirals => self.n_per_cluster_spirals,
            Family::ThreeRings => self.n_per_cluster_rings,
            Family::FourGaussians => self.n_per_cluster_gaussians,
        }
    }

    /// Noise table for a family; four-gaussians has none.
    pub fn noise_table(&self, family: Family) -> Option<[f64; 3]> {
        match family {
            Family::TwoArcs => Some(self.arcs_noise),
            Family::ThreeSpirals => Some(self.spiral_noise),
            Family::ThreeRings => Some(self.rings_noise),
            Family::FourGaussians => None,
        }
    }
}
