use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cluster::Linkage;
use crate::connect::{ConnectorConfig, Penalty, Scheme};
use crate::data::{DataConstants, DatasetSpec, Embedding, Family, Noise};
use crate::error::{Error, Result};
use crate::knn::DEFAULT_K;

pub const DEFAULT_REALIZATIONS: usize = 20;
pub const DEFAULT_SIGMA_FACTOR: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    Euclidean,
    Pknng,
    MinK,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Euclidean => "euclidean",
            MetricKind::Pknng => "pknng",
            MetricKind::MinK => "min-k",
        })
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "euclidean" => Ok(MetricKind::Euclidean),
            "pknng" => Ok(MetricKind::Pknng),
            "min-k" | "mink" => Ok(MetricKind::MinK),
            _ => Err(Error::param(format!("unknown metric {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Algorithm {
    Pam,
    Hc {
        #[serde(default)]
        linkage: Linkage,
    },
    Mst,
    Spectral {
        #[serde(default = "default_sigma_factor")]
        sigma_factor: f64,
    },
}

fn default_sigma_factor() -> f64 {
    DEFAULT_SIGMA_FACTOR
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Pam => f.write_str("pam"),
            Algorithm::Hc { linkage } => write!(f, "hc-{linkage}"),
            Algorithm::Mst => f.write_str("mst"),
            Algorithm::Spectral { sigma_factor } => write!(f, "spectral(sigma_factor={sigma_factor:?})"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    /// `pam`, `hc`, `hc-single`, `mst`, `spectral`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        match s.as_str() {
            "pam" => Ok(Algorithm::Pam),
            "hc" => Ok(Algorithm::Hc {
                linkage: Linkage::default(),
            }),
            "mst" => Ok(Algorithm::Mst),
            "spectral" => Ok(Algorithm::Spectral {
                sigma_factor: DEFAULT_SIGMA_FACTOR,
            }),
            other => match other.strip_prefix("hc-") {
                Some(l) => Ok(Algorithm::Hc { linkage: l.parse()? }),
                None => Err(Error::param(format!("unknown algorithm {s:?}"))),
            },
        }
    }
}

/// One way of turning a point set into a clustering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    /// Unique within an experiment; names result rows and seeds.
    pub name: String,
    pub metric: MetricKind,
    /// Used only when `metric` is `pknng`.
    #[serde(default)]
    pub connector: ConnectorConfig,
    pub algorithm: Algorithm,
    /// Defaults to the dataset's true class count.
    #[serde(default)]
    pub k_clusters: Option<usize>,
}

impl MethodSpec {
    pub fn new(name: impl Into<String>, metric: MetricKind, algorithm: Algorithm) -> Self {
        Self {
            name: name.into(),
            metric,
            connector: ConnectorConfig::default(),
            algorithm,
            k_clusters: None,
        }
    }

    pub fn pknng(name: impl Into<String>, scheme: Scheme, penalty: Penalty, algorithm: Algorithm) -> Self {
        Self {
            connector: ConnectorConfig::new(scheme, penalty),
            ..Self::new(name, MetricKind::Pknng, algorithm)
        }
    }

    /// Named presets: `pknng-pam`, `pknng-hc`, `pknng-mst`, `euclidean-pam`,
    /// `mst`, `single-linkage`, `spectral`, `min-k-pam`.
    pub fn preset(name: &str) -> Result<Self> {
        let default_pknng = |algo| Self::pknng(name, Scheme::MinSpan, Penalty::Exponential, algo);
        Ok(match name {
            "pknng-pam" => default_pknng(Algorithm::Pam),
            "pknng-hc" => default_pknng(Algorithm::Hc {
                linkage: Linkage::Average,
            }),
            "pknng-mst" => default_pknng(Algorithm::Mst),
            "euclidean-pam" => Self::new(name, MetricKind::Euclidean, Algorithm::Pam),
            "mst" => Self::new(name, MetricKind::Euclidean, Algorithm::Mst),
            "single-linkage" => Self::new(
                name,
                MetricKind::Euclidean,
                Algorithm::Hc {
                    linkage: Linkage::Single,
                },
            ),
            "spectral" => Self::new(
                name,
                MetricKind::Euclidean,
                Algorithm::Spectral {
                    sigma_factor: DEFAULT_SIGMA_FACTOR,
                },
            ),
            "min-k-pam" => Self::new(name, MetricKind::MinK, Algorithm::Pam),
            _ => return Err(Error::param(format!("unknown method preset {name:?}"))),
        })
    }

    pub const PRESETS: [&'static str; 8] = [
        "pknng-pam",
        "pknng-hc",
        "pknng-mst",
        "euclidean-pam",
        "mst",
        "single-linkage",
        "spectral",
        "min-k-pam",
    ];

    /// Human-readable description with every default spelled out.
    pub fn describe(&self) -> String {
        let metric = match self.metric {
            MetricKind::Pknng => format!(
                "pknng(scheme={}, penalty={})",
                self.connector.scheme, self.connector.penalty
            ),
            other => other.to_string(),
        };
        let k = self.k_clusters.map_or("true-classes".to_string(), |k| k.to_string());
        format!("{}: metric={metric} algorithm={} k={k}", self.name, self.algorithm)
    }
}

/// A dataset cell of the grid; its seed comes from the experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetCell {
    pub family: Family,
    pub noise: Noise,
    pub embedding: Embedding,
    /// Defaults to the constants table.
    #[serde(default)]
    pub n_per_cluster: Option<usize>,
    #[serde(default)]
    pub embed_noise_sigma: Option<f64>,
}

impl DatasetCell {
    pub fn new(family: Family, noise: Noise, embedding: Embedding) -> Self {
        Self {
            family,
            noise,
            embedding,
            n_per_cluster: None,
            embed_noise_sigma: None,
        }
    }

    /// Stable identity used for seeds and result rows, e.g.
    /// `two-arcs/low/3d-noise`.
    pub fn key(&self) -> String {
        let mut key = format!("{}/{}/{}", self.family, self.noise, self.embedding);
        if let Some(n) = self.n_per_cluster {
            key.push_str(&format!("/n={n}"));
        }
        if let Some(s) = self.embed_noise_sigma {
            key.push_str(&format!("/embed-sigma={s:?}"));
        }
        key
    }

    pub fn dataset_spec(&self, constants: &DataConstants, seed: u64) -> DatasetSpec {
        DatasetSpec {
            family: self.family,
            n_per_cluster: self
                .n_per_cluster
                .unwrap_or_else(|| constants.default_n_per_cluster(self.family)),
            noise: self.noise,
            embedding: self.embedding,
            embed_noise_sigma: self.embed_noise_sigma,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default = "default_knn_k")]
    pub knn_k: usize,
    #[serde(default)]
    pub constants: DataConstants,
    #[serde(default)]
    pub datasets: Vec<DatasetCell>,
    #[serde(default)]
    pub methods: Vec<MethodSpec>,
}

fn default_realizations() -> usize {
    DEFAULT_REALIZATIONS
}

fn default_knn_k() -> usize {
    DEFAULT_K
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            base_seed: 0,
            realizations: DEFAULT_REALIZATIONS,
            knn_k: DEFAULT_K,
            constants: DataConstants::default(),
            datasets: Vec::new(),
            methods: Vec::new(),
        }
    }
}

impl ExperimentSpec {
    /// Cartesian product of families, noise levels and embeddings.
    pub fn with_grid(mut self, families: &[Family], noises: &[Noise], embeddings: &[Embedding]) -> Self {
        for &family in families {
            for &noise in noises {
                for &embedding in embeddings {
                    self.datasets.push(DatasetCell::new(family, noise, embedding));
                }
            }
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::param("realizations must be >= 1"));
        }
        if self.knn_k == 0 {
            return Err(Error::param("knn_k must be >= 1"));
        }
        let mut names: Vec<&str> = self.methods.iter().map(|m| m.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::param(format!("duplicate method name {:?}", w[0])));
        }
        let mut keys: Vec<String> = self.datasets.iter().map(DatasetCell::key).collect();
        keys.sort_unstable();
        if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::param(format!("duplicate dataset cell {:?}", w[0])));
        }
        for m in &self.methods {
            if let Algorithm::Spectral { sigma_factor } = m.algorithm {
                if !(sigma_factor > 0.0) || !sigma_factor.is_finite() {
                    return Err(Error::param(format!("{}: sigma_factor must be > 0", m.name)));
                }
            }
            if m.k_clusters == Some(0) {
                return Err(Error::param(format!("{}: k_clusters must be >= 1", m.name)));
            }
        }
        for cell in &self.datasets {
            cell.dataset_spec(&self.constants, 0).validate()?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_json_gets_defaults() {
        let spec = ExperimentSpec::from_json(
            r#"{
                "datasets": [{"family": "two-arcs", "noise": "low", "embedding": "2d"}],
                "methods": [
                    {"name": "a", "metric": "pknng", "algorithm": {"name": "pam"}},
                    {"name": "b", "metric": "euclidean", "algorithm": {"name": "hc", "linkage": "single"}},
                    {"name": "c", "metric": "euclidean", "algorithm": {"name": "spectral"}}
                ]
            }"#,
        )
        .unwrap();
        assert_eq!(spec.realizations, DEFAULT_REALIZATIONS);
        assert_eq!(spec.knn_k, DEFAULT_K);
        assert_eq!(spec.constants, DataConstants::default());
        assert_eq!(spec.methods[0].connector, ConnectorConfig::default());
        assert_eq!(spec.methods[1].algorithm, Algorithm::Hc { linkage: Linkage::Single });
        assert_eq!(spec.methods[2].algorithm, Algorithm::Spectral { sigma_factor: 1.0 });
    }

    #[test]
    fn json_round_trip() {
        let mut spec = ExperimentSpec::default().with_grid(
            &[Family::ThreeRings],
            &[Noise::Medium, Noise::Sigma(0.3)],
            &Embedding::ALL,
        );
        for p in MethodSpec::PRESETS {
            spec.methods.push(MethodSpec::preset(p).unwrap());
        }
        spec.methods[0].k_clusters = Some(3);
        let back = ExperimentSpec::from_json(&spec.to_json().unwrap()).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.datasets.len(), 8);
    }

    #[test]
    fn validation() {
        let mut spec = ExperimentSpec::default();
        spec.methods = vec![MethodSpec::preset("mst").unwrap(), MethodSpec::preset("mst").unwrap()];
        assert!(spec.validate().is_err());
        spec.methods.pop();
        spec.realizations = 0;
        assert!(spec.validate().is_err());
        spec.realizations = 1;
        spec.datasets.push(DatasetCell {
            n_per_cluster: Some(3),
            ..DatasetCell::new(Family::TwoArcs, Noise::Low, Embedding::Plane2d)
        });
        assert!(spec.validate().is_err());
    }

    #[test]
    fn keys_are_distinct() {
        let a = DatasetCell::new(Family::TwoArcs, Noise::Low, Embedding::Plane2d);
        let b = DatasetCell::new(Family::TwoArcs, Noise::Low, Embedding::Swiss3d);
        let c = DatasetCell {
            n_per_cluster: Some(50),
            ..a.clone()
        };
        assert_eq!(a.key(), "two-arcs/low/2d");
        assert_ne!(a.key(), b.key());
        assert_eq!(c.key(), "two-arcs/low/2d/n=50");
    }

    #[test]
    fn algorithm_names() {
        assert_eq!("hc-complete".parse::<Algorithm>().unwrap(), Algorithm::Hc { linkage: Linkage::Complete });
        assert!("kmeans".parse::<Algorithm>().is_err());
        assert!(MethodSpec::preset("nope").is_err());
    }
}
