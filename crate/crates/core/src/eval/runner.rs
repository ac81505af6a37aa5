use std::collections::HashMap;
use std::time::Instant;

use crate::cluster::{accuracy, hierarchical, mst_cluster, pam, spectral, ClusterAssignment};
use crate::connect::ConnectorConfig;
use crate::data::generate;
use crate::error::{Error, Result};
use crate::geodesic::{min_k_metric, pknng_metric_with};
use crate::par::Execution;
use crate::points::{euclidean_matrix_with, DissimilarityMatrix, PointSet};
use crate::rng::{derive_seed, SeededRng};

use super::spec::{Algorithm, DatasetCell, ExperimentSpec, MetricKind, MethodSpec};

pub fn compute_metric(
    ps: &PointSet,
    metric: MetricKind,
    connector: &ConnectorConfig,
    knn_k: usize,
    exec: Execution,
) -> Result<DissimilarityMatrix> {
    match metric {
        MetricKind::Euclidean => Ok(euclidean_matrix_with(ps, exec)),
        MetricKind::Pknng => Ok(pknng_metric_with(ps, knn_k, connector, exec)?.matrix),
        MetricKind::MinK => Ok(min_k_metric(ps, exec)?.0),
    }
}

pub fn run_algorithm(d: &DissimilarityMatrix, algorithm: Algorithm, k: usize, seed: u64) -> Result<ClusterAssignment> {
    match algorithm {
        Algorithm::Pam => pam(d, k),
        Algorithm::Hc { linkage } => hierarchical(d, k, linkage),
        Algorithm::Mst => mst_cluster(d, k),
        Algorithm::Spectral { sigma_factor } => spectral(d, k, sigma_factor, &mut SeededRng::new(seed)),
    }
}

/// Matrices for one point set, computed once per distinct metric.
pub(crate) struct MetricCache<'a> {
    ps: &'a PointSet,
    knn_k: usize,
    exec: Execution,
    done: HashMap<(MetricKind, Option<ConnectorConfig>), (std::result::Result<DissimilarityMatrix, String>, f64)>,
}

impl<'a> MetricCache<'a> {
    pub(crate) fn new(ps: &'a PointSet, knn_k: usize, exec: Execution) -> Self {
        Self {
            ps,
            knn_k,
            exec,
            done: HashMap::new(),
        }
    }

    /// The matrix (or the error text) and the seconds it took.
    pub(crate) fn get(&mut self, m: &MethodSpec) -> (std::result::Result<&DissimilarityMatrix, String>, f64) {
        let key = (m.metric, (m.metric == MetricKind::Pknng).then_some(m.connector));
        let (ps, knn_k, exec) = (self.ps, self.knn_k, self.exec);
        let entry = self.done.entry(key).or_insert_with(|| {
            let t = Instant::now();
            let d = compute_metric(ps, m.metric, &m.connector, knn_k, exec).map_err(|e| e.to_string());
            (d, t.elapsed().as_secs_f64())
        });
        (entry.0.as_ref().map_err(Clone::clone), entry.1)
    }
}

/// Accuracy of `method` on `ps` against its labels, plus wall seconds
/// (including the metric, even when it was cached).
pub(crate) fn score(
    cache: &mut MetricCache<'_>,
    ps: &PointSet,
    method: &MethodSpec,
    seed: u64,
) -> (std::result::Result<f64, String>, f64) {
    let (d, metric_secs) = cache.get(method);
    let d = match d {
        Ok(d) => d,
        Err(e) => return (Err(e), metric_secs),
    };
    let t = Instant::now();
    let acc = (|| {
        let truth = ps
            .labels()
            .ok_or_else(|| Error::param("scoring needs ground-truth labels"))?;
        let k = method.k_clusters.unwrap_or_else(|| ps.num_classes());
        let a = run_algorithm(d, method.algorithm, k, seed)?;
        accuracy(&a, truth)
    })();
    (acc.map_err(|e| e.to_string()), metric_secs + t.elapsed().as_secs_f64())
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizationResult {
    pub realization: usize,
    pub data_seed: u64,
    pub algo_seed: u64,
    pub accuracy: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub dataset: String,
    pub method: String,
    pub realizations: Vec<RealizationResult>,
    pub wall_seconds: f64,
}

/// `(mean, std)` of `values`; the sample standard deviation, 0 for a single
/// value. `None` when empty.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n == 1 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    Some((mean, std))
}

impl CellResult {
    pub fn accuracies(&self) -> Vec<f64> {
        self.realizations.iter().filter_map(|r| r.accuracy).collect()
    }

    pub fn failures(&self) -> usize {
        self.realizations.iter().filter(|r| r.accuracy.is_none()).count()
    }

    /// Over successful realizations only; NaN if all failed.
    pub fn mean(&self) -> f64 {
        mean_std(&self.accuracies()).map_or(f64::NAN, |m| m.0)
    }

    pub fn std(&self) -> f64 {
        mean_std(&self.accuracies()).map_or(f64::NAN, |m| m.1)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentResult {
    pub cells: Vec<CellResult>,
}

impl ExperimentResult {
    pub fn cell(&self, dataset: &str, method: &str) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.dataset == dataset && c.method == method)
    }
}

pub fn data_seed(base: u64, cell: &DatasetCell, realization: usize) -> u64 {
    derive_seed(base, &format!("data:{}", cell.key()), realization as u64)
}

pub fn algo_seed(base: u64, cell: &DatasetCell, method: &str, realization: usize) -> u64 {
    derive_seed(base, &format!("algo:{}|{method}", cell.key()), realization as u64)
}

/// All realizations of one dataset cell for several methods. The dataset is
/// generated once per realization and shared by the methods. Realizations
/// run under `exec`; the metric computations run sequentially inside them.
pub fn run_dataset(spec: &ExperimentSpec, cell: &DatasetCell, methods: &[&MethodSpec], exec: Execution) -> Vec<CellResult> {
    let per_real = exec.map_range(spec.realizations, |r| {
        let seed = data_seed(spec.base_seed, cell, r);
        let data = generate(&cell.dataset_spec(&spec.constants, seed), &spec.constants);
        let mut out = Vec::with_capacity(methods.len());
        match data {
            Err(e) => {
                for m in methods {
                    out.push((Err(e.to_string()), 0.0, algo_seed(spec.base_seed, cell, &m.name, r)));
                }
            }
            Ok(ps) => {
                let mut cache = MetricCache::new(&ps, spec.knn_k, Execution::Sequential);
                for m in methods {
                    let s = algo_seed(spec.base_seed, cell, &m.name, r);
                    let (acc, secs) = score(&mut cache, &ps, m, s);
                    out.push((acc, secs, s));
                }
            }
        }
        (seed, out)
    });
    methods
        .iter()
        .enumerate()
        .map(|(mi, m)| {
            let mut wall = 0.0;
            let realizations = per_real
                .iter()
                .enumerate()
                .map(|(r, (seed, rows))| {
                    let (acc, secs, s) = &rows[mi];
                    wall += secs;
                    RealizationResult {
                        realization: r,
                        data_seed: *seed,
                        algo_seed: *s,
                        accuracy: acc.as_ref().ok().copied(),
                        error: acc.as_ref().err().cloned(),
                    }
                })
                .collect();
            CellResult {
                dataset: cell.key(),
                method: m.name.clone(),
                realizations,
                wall_seconds: wall,
            }
        })
        .collect()
}

/// One (dataset, method) cell.
pub fn run_cell(spec: &ExperimentSpec, cell: &DatasetCell, method: &MethodSpec, exec: Execution) -> CellResult {
    run_dataset(spec, cell, &[method], exec).remove(0)
}

/// Every (dataset, method) cell, in dataset-major order, held in memory.
pub fn run_grid(spec: &ExperimentSpec, exec: Execution) -> Result<ExperimentResult> {
    spec.validate()?;
    let methods: Vec<&MethodSpec> = spec.methods.iter().collect();
    let mut cells = Vec::new();
    for cell in &spec.datasets {
        cells.extend(run_dataset(spec, cell, &methods, exec));
    }
    Ok(ExperimentResult { cells })
}
