//! Clustering accuracy on non-overlapping MNIST digit subsets.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{load_mnist_idx, sample_digit_subsets};
use crate::error::{Error, Result};
use crate::knn::DEFAULT_K;
use crate::par::Execution;
use crate::points::PointSet;
use crate::rng::{derive_seed, SeededRng};

use super::runner::{mean_std, score, MetricCache};
use super::spec::MethodSpec;

/// Environment variable naming the directory with the IDX files.
pub const MNIST_DIR_VAR: &str = "PKNNG_MNIST_DIR";
pub const TRAIN_IMAGES: &str = "train-images-idx3-ubyte";
pub const TRAIN_LABELS: &str = "train-labels-idx1-ubyte";

/// `$PKNNG_MNIST_DIR` if set, else `fallback`.
pub fn mnist_dir(fallback: impl AsRef<Path>) -> PathBuf {
    std::env::var_os(MNIST_DIR_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| fallback.as_ref().to_path_buf())
}

/// Training-set image and label paths inside `dir`.
pub fn mnist_files(dir: impl AsRef<Path>) -> (PathBuf, PathBuf) {
    let dir = dir.as_ref();
    (dir.join(TRAIN_IMAGES), dir.join(TRAIN_LABELS))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MnistConfig {
    pub digits: Vec<usize>,
    pub per_class: usize,
    pub repeats: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_k")]
    pub knn_k: usize,
    pub methods: Vec<MethodSpec>,
}

fn default_k() -> usize {
    DEFAULT_K
}

impl MnistConfig {
    pub fn digits_key(&self) -> String {
        self.digits.iter().map(ToString::to_string).collect::<Vec<_>>().join("-")
    }

    pub fn subset_seed(&self) -> u64 {
        derive_seed(self.base_seed, &format!("mnist-subsets:{}", self.digits_key()), 0)
    }

    pub fn algo_seed(&self, method: &str, repeat: usize) -> u64 {
        derive_seed(self.base_seed, &format!("mnist:{}|{method}", self.digits_key()), repeat as u64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MnistRow {
    pub method: String,
    /// One accuracy per repeat, in repeat order.
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

/// Sample the subsets from `ps` (digit labels 0..=9) and score every method
/// on each. Subsets run under `exec`. Any failure aborts.
pub fn run_mnist(ps: &PointSet, cfg: &MnistConfig, exec: Execution) -> Result<Vec<MnistRow>> {
    if cfg.methods.is_empty() {
        return Err(Error::param("no methods given"));
    }
    let mut rng = SeededRng::new(cfg.subset_seed());
    let subsets = sample_digit_subsets(ps, &cfg.digits, cfg.per_class, cfg.repeats, &mut rng)?;
    let per_subset = exec.map_range(subsets.len(), |r| {
        let sub = &subsets[r];
        let mut cache = MetricCache::new(sub, cfg.knn_k, Execution::Sequential);
        cfg.methods
            .iter()
            .map(|m| {
                let mut m = m.clone();
                m.k_clusters = m.k_clusters.or(Some(cfg.digits.len()));
                score(&mut cache, sub, &m, cfg.algo_seed(&m.name, r)).0
            })
            .collect::<Vec<_>>()
    });
    cfg.methods
        .iter()
        .enumerate()
        .map(|(mi, m)| {
            let accuracies = per_subset
                .iter()
                .map(|row| row[mi].clone().map_err(|e| Error::param(format!("{}: {e}", m.name))))
                .collect::<Result<Vec<f64>>>()?;
            let (mean, std) = mean_std(&accuracies).expect("repeats >= 1");
            Ok(MnistRow {
                method: m.name.clone(),
                accuracies,
                mean,
                std,
            })
        })
        .collect()
}

pub fn run_mnist_files(
    images: impl AsRef<Path>,
    labels: impl AsRef<Path>,
    cfg: &MnistConfig,
    exec: Execution,
) -> Result<Vec<MnistRow>> {
    let ps = load_mnist_idx(images, labels)?;
    run_mnist(&ps, cfg, exec)
}

/// `method,digits,per_class,repeats,mean,std,accuracies` with the
/// accuracies joined by `;`.
pub fn write_mnist_table<W: Write>(rows: &[MnistRow], cfg: &MnistConfig, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["method", "digits", "per_class", "repeats", "mean", "std", "accuracies"])?;
    for r in rows {
        let accs: Vec<String> = r.accuracies.iter().map(|a| format!("{a:?}")).collect();
        wr.write_record([
            r.method.clone(),
            cfg.digits_key(),
            cfg.per_class.to_string(),
            cfg.repeats.to_string(),
            format!("{:?}", r.mean),
            format!("{:?}", r.std),
            accs.join(";"),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
