//! Connector edges that join the components of a pruned knn-graph.
//!
//! Every added edge gets weight `penalized_weight(d, mu, penalty)` where `d`
//! is the Euclidean length of the edge and `mu` the mean ORIGINAL edge
//! weight after pruning.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{components, DisjointSets, Edge, EdgeKind, WeightedGraph};
use crate::knn::MIN_EDGE_WEIGHT;
use crate::par::Execution;
use crate::points::{euclidean, mean_pairwise_distance, PointSet};

/// Connector weights are capped here so that path sums stay finite.
pub const MAX_EDGE_WEIGHT: f64 = 1e250;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Minimum spanning set of shortest inter-component edges.
    #[default]
    MinSpan,
    /// Shortest edge between every pair of components.
    AllSubGraphs,
    /// Every pair of points not already joined by an original edge.
    AllEdges,
    /// Every pair of component medoids.
    Medoids,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Penalty {
    /// `d * exp(d / mu)`
    #[default]
    Exponential,
    /// `d * exp(d / mu - 1)`
    #[serde(rename = "shifted")]
    ExponentialShifted,
    /// `d`
    Plain,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuSource {
    /// Mean ORIGINAL edge weight after pruning, falling back to the mean
    /// pairwise distance when no original edge survives.
    #[default]
    PostPruneMean,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConnectorConfig {
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub penalty: Penalty,
    #[serde(default)]
    pub mu_source: MuSource,
}

impl ConnectorConfig {
    pub fn new(scheme: Scheme, penalty: Penalty) -> Self {
        Self {
            scheme,
            penalty,
            mu_source: MuSource::PostPruneMean,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::MinSpan => "minspan",
            Scheme::AllSubGraphs => "allsubgraphs",
            Scheme::AllEdges => "alledges",
            Scheme::Medoids => "medoids",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "minspan" => Ok(Scheme::MinSpan),
            "allsubgraphs" => Ok(Scheme::AllSubGraphs),
            "alledges" => Ok(Scheme::AllEdges),
            "medoids" => Ok(Scheme::Medoids),
            _ => Err(Error::param(format!("unknown scheme {s:?}"))),
        }
    }
}

impl fmt::Display for Penalty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Penalty::Exponential => "exponential",
            Penalty::ExponentialShifted => "shifted",
            Penalty::Plain => "plain",
        })
    }
}

impl FromStr for Penalty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "exponential" | "exp" => Ok(Penalty::Exponential),
            "shifted" | "exponentialshifted" => Ok(Penalty::ExponentialShifted),
            "plain" | "none" => Ok(Penalty::Plain),
            _ => Err(Error::param(format!("unknown penalty {s:?}"))),
        }
    }
}

/// Mean weight of the ORIGINAL edges.
pub fn mean_edge_weight(g: &WeightedGraph) -> Result<f64> {
    let (sum, count) = g
        .edges_of_kind(EdgeKind::Original)
        .fold((0.0, 0usize), |(s, c), e| (s + e.weight, c + 1));
    if count == 0 {
        return Err(Error::NoOriginalEdges);
    }
    Ok(sum / count as f64)
}

/// Length scale of the penalty for `g` over `ps`.
pub fn resolve_mu(g: &WeightedGraph, ps: &PointSet, source: MuSource) -> Result<f64> {
    match source {
        MuSource::PostPruneMean => match mean_edge_weight(g) {
            Ok(mu) => Ok(mu),
            Err(Error::NoOriginalEdges) => mean_pairwise_distance(ps),
            Err(e) => Err(e),
        },
    }
}

pub fn penalized_weight(d: f64, mu: f64, penalty: Penalty) -> Result<f64> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::param(format!("mu = {mu} must be positive and finite")));
    }
    if !(d >= 0.0) {
        return Err(Error::param(format!("distance {d} must be non-negative")));
    }
    Ok(match penalty {
        Penalty::Exponential => d * (d / mu).exp(),
        Penalty::ExponentialShifted => d * (d / mu - 1.0).exp(),
        Penalty::Plain => d,
    })
}

fn connector_weight(d: f64, mu: f64, penalty: Penalty) -> Result<f64> {
    let w = penalized_weight(d, mu, penalty)?;
    Ok(if w.is_finite() {
        w.clamp(MIN_EDGE_WEIGHT, MAX_EDGE_WEIGHT)
    } else {
        MAX_EDGE_WEIGHT
    })
}

pub fn connect_graph(g: &WeightedGraph, ps: &PointSet, cfg: &ConnectorConfig) -> Result<WeightedGraph> {
    connect_graph_with(g, ps, cfg, Execution::default())
}

pub fn connect_graph_with(
    g: &WeightedGraph,
    ps: &PointSet,
    cfg: &ConnectorConfig,
    exec: Execution,
) -> Result<WeightedGraph> {
    check_sizes(g, ps)?;
    if ps.n() == 1 {
        return Ok(g.clone());
    }
    let mu = resolve_mu(g, ps, cfg.mu_source)?;
    connect_graph_with_mu(g, ps, cfg, mu, exec)
}

/// As [`connect_graph`] with an explicit penalty scale.
pub fn connect_graph_with_mu(
    g: &WeightedGraph,
    ps: &PointSet,
    cfg: &ConnectorConfig,
    mu: f64,
    exec: Execution,
) -> Result<WeightedGraph> {
    check_sizes(g, ps)?;
    let pairs = connector_pairs(g, ps, cfg.scheme, exec);
    let mut added = Vec::with_capacity(pairs.len());
    for (i, j) in pairs {
        let w = connector_weight(ps.dist(i, j), mu, cfg.penalty)?;
        added.push(Edge::new(i, j, w, EdgeKind::Added, false));
    }
    g.with_added(added)
}

fn check_sizes(g: &WeightedGraph, ps: &PointSet) -> Result<()> {
    if g.n() != ps.n() {
        return Err(Error::LengthMismatch {
            expected: ps.n(),
            found: g.n(),
        });
    }
    Ok(())
}

/// Endpoint pairs the scheme would add, without weights.
pub fn connector_pairs(
    g: &WeightedGraph,
    ps: &PointSet,
    scheme: Scheme,
    exec: Execution,
) -> Vec<(usize, usize)> {
    let n = ps.n();
    match scheme {
        Scheme::AllEdges => {
            let mut out = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if !g.has_edge(i, j) {
                        out.push((i, j));
                    }
                }
            }
            out
        }
        Scheme::MinSpan | Scheme::AllSubGraphs => {
            let labels = components(g);
            if labels.count <= 1 {
                return Vec::new();
            }
            let best = closest_pairs(ps, &labels.component_of, labels.count, exec);
            if scheme == Scheme::AllSubGraphs {
                return best.iter().map(|c| (c.i, c.j)).collect();
            }
            let mut order: Vec<&Candidate> = best.iter().collect();
            order.sort_by(|a, b| a.dist.total_cmp(&b.dist).then((a.ca, a.cb).cmp(&(b.ca, b.cb))));
            let mut ds = DisjointSets::new(labels.count);
            let mut out = Vec::with_capacity(labels.count - 1);
            for c in order {
                if ds.union(c.ca, c.cb) {
                    out.push((c.i, c.j));
                }
            }
            out.sort_unstable();
            out
        }
        Scheme::Medoids => {
            let labels = components(g);
            let medoids: Vec<usize> = labels
                .members()
                .iter()
                .map(|m| euclidean_medoid(ps, m))
                .collect();
            let mut out = Vec::new();
            for a in 0..medoids.len() {
                for b in a + 1..medoids.len() {
                    let (i, j) = (medoids[a], medoids[b]);
                    out.push(if i < j { (i, j) } else { (j, i) });
                }
            }
            out
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    ca: usize,
    cb: usize,
    i: usize,
    j: usize,
    dist: f64,
}

/// Shortest point pair between every pair of components, by exhaustive
/// scan. Ties go to the lexicographically smallest `(i, j)`.
fn closest_pairs(ps: &PointSet, comp: &[usize], count: usize, exec: Execution) -> Vec<Candidate> {
    let n = ps.n();
    // Row-local minima toward each component, merged in row order.
    let rows: Vec<Vec<(usize, f64)>> = exec.map_range(n, |i| {
        let mut best = vec![(usize::MAX, f64::INFINITY); count];
        let pi = ps.point(i);
        for j in i + 1..n {
            if comp[j] != comp[i] {
                let d = euclidean(pi, ps.point(j));
                if d < best[comp[j]].1 {
                    best[comp[j]] = (j, d);
                }
            }
        }
        best
    });
    let idx = |a: usize, b: usize| a * count + b;
    let mut table: Vec<Option<Candidate>> = vec![None; count * count];
    for (i, row) in rows.iter().enumerate() {
        for (c, &(j, d)) in row.iter().enumerate() {
            if j == usize::MAX {
                continue;
            }
            let (ca, cb) = if comp[i] < c { (comp[i], c) } else { (c, comp[i]) };
            let slot = &mut table[idx(ca, cb)];
            let better = match slot {
                None => true,
                Some(cur) => d < cur.dist || (d == cur.dist && (i, j) < (cur.i, cur.j)),
            };
            if better {
                *slot = Some(Candidate { ca, cb, i, j, dist: d });
            }
        }
    }
    table.into_iter().flatten().collect()
}

/// Member minimizing the summed Euclidean distance to the others; lowest
/// index on ties.
pub fn euclidean_medoid(ps: &PointSet, members: &[usize]) -> usize {
    let mut best = (f64::INFINITY, usize::MAX);
    for &m in members {
        let s: f64 = members.iter().map(|&o| ps.dist(m, o)).sum();
        if s < best.0 || (s == best.0 && m < best.1) {
            best = (s, m);
        }
    }
    best.1
}
