//! Synthetic manifold datasets, embeddings and MNIST ingestion.

mod constants;
mod embed;
mod generators;
mod mnist;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::rng::SeededRng;

pub use constants::DataConstants;
pub use embed::{embed, random_rotation, swiss_roll_point, SwissRoll};
pub use generators::{gen_four_gaussians, gen_three_rings, gen_three_spirals, gen_two_arcs};
pub use mnist::{
    load_mnist_idx, parse_idx_images, parse_idx_labels, sample_digit_indices, sample_digit_subsets,
    IdxImages, IMAGE_MAGIC, LABEL_MAGIC,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    TwoArcs,
    ThreeSpirals,
    ThreeRings,
    FourGaussians,
}

impl Family {
    pub fn class_count(self) -> usize {
        match self {
            Family::TwoArcs => 2,
            Family::ThreeSpirals => 3,
            Family::ThreeRings => 5,
            Family::FourGaussians => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::TwoArcs => "two-arcs",
            Family::ThreeSpirals => "three-spirals",
            Family::ThreeRings => "three-rings",
            Family::FourGaussians => "four-gaussians",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "two-arcs" | "arcs" => Ok(Family::TwoArcs),
            "three-spirals" | "spirals" => Ok(Family::ThreeSpirals),
            "three-rings" | "rings" => Ok(Family::ThreeRings),
            "four-gaussians" | "gaussians" => Ok(Family::FourGaussians),
            _ => Err(Error::param(format!("unknown dataset family {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Embedding {
    #[serde(rename = "2d")]
    Plane2d,
    #[serde(rename = "3d")]
    Swiss3d,
    #[serde(rename = "3d-noise")]
    Swiss3dNoise,
    #[serde(rename = "10d-noise")]
    Rot10dNoise,
}

impl Embedding {
    pub const ALL: [Embedding; 4] = [
        Embedding::Plane2d,
        Embedding::Swiss3d,
        Embedding::Swiss3dNoise,
        Embedding::Rot10dNoise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Embedding::Plane2d => "2d",
            Embedding::Swiss3d => "3d",
            Embedding::Swiss3dNoise => "3d-noise",
            Embedding::Rot10dNoise => "10d-noise",
        }
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Embedding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "2d" | "plane" => Ok(Embedding::Plane2d),
            "3d" | "swiss" => Ok(Embedding::Swiss3d),
            "3d-noise" | "swiss-noise" => Ok(Embedding::Swiss3dNoise),
            "10d-noise" | "10d" => Ok(Embedding::Rot10dNoise),
            _ => Err(Error::param(format!("unknown embedding {s:?}"))),
        }
    }
}

/// A named noise level from the constants table or an explicit sigma.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Noise {
    Low,
    Medium,
    High,
    Sigma(f64),
}

impl Noise {
    pub const LEVELS: [Noise; 3] = [Noise::Low, Noise::Medium, Noise::High];

    pub fn sigma(self, table: [f64; 3]) -> f64 {
        match self {
            Noise::Low => table[0],
            Noise::Medium => table[1],
            Noise::High => table[2],
            Noise::Sigma(s) => s,
        }
    }
}

impl fmt::Display for Noise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Noise::Low => f.write_str("low"),
            Noise::Medium => f.write_str("medium"),
            Noise::High => f.write_str("high"),
            Noise::Sigma(s) => write!(f, "{s:?}"),
        }
    }
}

impl FromStr for Noise {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "low" => Ok(Noise::Low),
            "medium" => Ok(Noise::Medium),
            "high" => Ok(Noise::High),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|v| *v >= 0.0 && v.is_finite())
                .map(Noise::Sigma)
                .ok_or_else(|| Error::param(format!("unknown noise level {s:?}"))),
        }
    }
}

impl Serialize for Noise {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Noise::Sigma(v) => s.serialize_f64(*v),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Noise {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Name(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v >= 0.0 && v.is_finite() => Ok(Noise::Sigma(v)),
            Raw::Num(v) => Err(serde::de::Error::custom(format!("noise sigma {v} must be >= 0"))),
            Raw::Name(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// One synthetic dataset realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub family: Family,
    pub n_per_cluster: usize,
    pub noise: Noise,
    pub embedding: Embedding,
    /// Embedding noise sigma; `None` derives it from the rolled data's
    /// diameter.
    #[serde(default)]
    pub embed_noise_sigma: Option<f64>,
    pub seed: u64,
}

impl DatasetSpec {
    pub fn new(family: Family, noise: Noise, embedding: Embedding, seed: u64) -> Self {
        Self {
            family,
            n_per_cluster: DataConstants::default().default_n_per_cluster(family),
            noise,
            embedding,
            embed_noise_sigma: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_per_cluster < 10 {
            return Err(Error::param(format!(
                "n_per_cluster = {} must be at least 10",
                self.n_per_cluster
            )));
        }
        if let Noise::Sigma(s) = self.noise {
            if !(s >= 0.0) || !s.is_finite() {
                return Err(Error::param(format!("noise sigma {s} must be >= 0")));
            }
        }
        if let Some(s) = self.embed_noise_sigma {
            if !(s >= 0.0) || !s.is_finite() {
                return Err(Error::param(format!("embedding noise sigma {s} must be >= 0")));
            }
        }
        Ok(())
    }
}

/// Planar sample (stream 0) followed by the embedding (stream 1).
pub fn generate(spec: &DatasetSpec, constants: &DataConstants) -> Result<PointSet> {
    spec.validate()?;
    let plane = match spec.family {
        Family::TwoArcs => gen_two_arcs(spec, constants)?,
        Family::ThreeSpirals => gen_three_spirals(spec, constants)?,
        Family::ThreeRings => gen_three_rings(spec, constants)?,
        Family::FourGaussians => gen_four_gaussians(spec, constants)?,
    };
    let mut rng = SeededRng::with_stream(spec.seed, 1);
    let out = embed(&plane, spec.embedding, spec.embed_noise_sigma, constants, &mut rng)?;
    Ok(out.with_seed(spec.seed))
}
