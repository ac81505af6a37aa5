//! Clustering on a precomputed [`DissimilarityMatrix`].

mod accuracy;
mod hierarchical;
mod kmeans;
mod mst;
mod pam;
mod spectral;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::points::DissimilarityMatrix;

pub use accuracy::{accuracy, confusion_matrix, hungarian_max};
pub use hierarchical::hierarchical;
pub use kmeans::{kmeans, KMeansResult};
pub use mst::{minimum_spanning_tree, mst_cluster};
pub use pam::{pam, pam_objective};
pub use spectral::{normalized_affinity, spectral, spectral_embedding, top_eigenvectors, SPECTRAL_RESTARTS};

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub medoids: Option<Vec<usize>>,
    pub objective: Option<f64>,
}

impl ClusterAssignment {
    /// Relabel arbitrary ids densely, in order of first appearance.
    pub fn from_labels(raw: &[usize]) -> Self {
        Self {
            labels: relabel_dense(raw),
            medoids: None,
            objective: None,
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k()];
        for &l in &self.labels {
            s[l] += 1;
        }
        s
    }

    /// CSV with header `point_index,cluster_id`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["point_index", "cluster_id"])?;
        for (i, l) in self.labels.iter().enumerate() {
            wr.write_record([i.to_string(), l.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }
}

pub(crate) fn relabel_dense(raw: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    raw.iter()
        .map(|&r| {
            let next = map.len();
            *map.entry(r).or_insert(next)
        })
        .collect()
}

pub(crate) fn check_k(d: &DissimilarityMatrix, k: usize) -> Result<()> {
    if k == 0 || k > d.n() {
        return Err(Error::param(format!(
            "cluster count k = {k} must satisfy 1 <= k <= n = {}",
            d.n()
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Linkage {
    Single,
    Complete,
    #[default]
    Average,
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
        })
    }
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            _ => Err(Error::param(format!("unknown linkage {s:?}"))),
        }
    }
}
