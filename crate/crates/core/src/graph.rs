//! Undirected weighted graphs over point indices.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EdgeKind {
    /// Edge of the k-nearest-neighbor graph.
    Original,
    /// Connector edge inserted to join components.
    Added,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeKind::Original => "ORIGINAL",
            EdgeKind::Added => "ADDED",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    /// Smaller endpoint.
    pub i: usize,
    /// Larger endpoint.
    pub j: usize,
    pub weight: f64,
    pub kind: EdgeKind,
    /// Both endpoints list each other among their k nearest neighbors.
    /// Always `false` for added edges.
    pub reciprocal: bool,
}

impl Edge {
    pub fn new(a: usize, b: usize, weight: f64, kind: EdgeKind, reciprocal: bool) -> Self {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        Self {
            i,
            j,
            weight,
            kind,
            reciprocal,
        }
    }
}

#[derive(Clone, Debug)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    /// Validates that endpoints are in range and distinct, pairs are unique
    /// and weights are positive and finite. Edges are kept sorted by `(i, j)`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| Edge::new(e.i, e.j, e.weight, e.kind, e.reciprocal))
            .collect();
        for e in &edges {
            if e.j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) out of range for {n} vertices",
                    e.i, e.j
                )));
            }
            if e.i == e.j {
                return Err(Error::InvalidGraph(format!("self-loop at {}", e.i)));
            }
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has weight {}",
                    e.i, e.j, e.weight
                )));
            }
        }
        edges.sort_by_key(|e| (e.i, e.j));
        if let Some(w) = edges.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0].i, w[0].j
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            adjacency[e.i].push((e.j, e.weight));
            adjacency[e.j].push((e.i, e.weight));
        }
        Ok(Self {
            n,
            edges,
            adjacency,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edges_of_kind(&self, kind: EdgeKind) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        self.edges
            .binary_search_by_key(&(i, j), |e| (e.i, e.j))
            .is_ok()
    }

    pub fn edge_set(&self) -> HashSet<(usize, usize)> {
        self.edges.iter().map(|e| (e.i, e.j)).collect()
    }

    /// Keep only edges for which `keep` is true.
    pub fn retain(&self, mut keep: impl FnMut(&Edge) -> bool) -> Self {
        let edges: Vec<Edge> = self.edges.iter().filter(|e| keep(e)).copied().collect();
        Self::from_edges(self.n, edges).expect("subset of a valid graph")
    }

    /// This graph plus `extra` edges.
    pub fn with_added(&self, extra: Vec<Edge>) -> Result<Self> {
        Self::from_edges(self.n, self.edges.iter().copied().chain(extra))
    }

    /// Connectivity over every edge regardless of kind.
    pub fn is_connected(&self) -> bool {
        self.n <= 1 || components_where(self, |_| true).count == 1
    }

    /// Edge-list dump, one `i j weight kind reciprocal` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        for e in &self.edges {
            writeln!(
                w,
                "{} {} {:?} {} {}",
                e.i,
                e.j,
                e.weight,
                e.kind,
                u8::from(e.reciprocal)
            )?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(n: usize, r: R) -> Result<Self> {
        let bad = |line: usize, detail: &str| Error::Format {
            what: "edge list",
            detail: format!("line {line}: {detail}"),
        };
        let mut edges = Vec::new();
        for (ln, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 5 {
                return Err(bad(ln + 1, "expected 5 fields"));
            }
            let i = f[0].parse().map_err(|_| bad(ln + 1, "vertex"))?;
            let j = f[1].parse().map_err(|_| bad(ln + 1, "vertex"))?;
            let weight = f[2].parse().map_err(|_| bad(ln + 1, "weight"))?;
            let kind = match f[3] {
                "ORIGINAL" => EdgeKind::Original,
                "ADDED" => EdgeKind::Added,
                _ => return Err(bad(ln + 1, "kind")),
            };
            let reciprocal = match f[4] {
                "1" => true,
                "0" => false,
                _ => return Err(bad(ln + 1, "reciprocal flag")),
            };
            edges.push(Edge::new(i, j, weight, kind, reciprocal));
        }
        Self::from_edges(n, edges)
    }
}

/// Union-find with path halving and union by size.
#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            sets: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `true` when `a` and `b` were in different sets.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.sets -= 1;
        true
    }

    pub fn num_sets(&self) -> usize {
        self.sets
    }

    /// Dense set ids, numbered in order of each set's smallest element.
    pub fn labeling(&mut self) -> Vec<usize> {
        let n = self.parent.len();
        let mut id_of_root = vec![usize::MAX; n];
        let mut next = 0;
        (0..n)
            .map(|v| {
                let r = self.find(v);
                if id_of_root[r] == usize::MAX {
                    id_of_root[r] = next;
                    next += 1;
                }
                id_of_root[r]
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentLabeling {
    pub component_of: Vec<usize>,
    pub count: usize,
}

impl ComponentLabeling {
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (v, &c) in self.component_of.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

/// Connected components over ORIGINAL edges. Ids follow the smallest vertex
/// index in each component.
pub fn components(g: &WeightedGraph) -> ComponentLabeling {
    components_where(g, |e| e.kind == EdgeKind::Original)
}

pub(crate) fn components_where(
    g: &WeightedGraph,
    mut use_edge: impl FnMut(&Edge) -> bool,
) -> ComponentLabeling {
    let mut ds = DisjointSets::new(g.n());
    for e in g.edges() {
        if use_edge(e) {
            ds.union(e.i, e.j);
        }
    }
    let count = ds.num_sets();
    ComponentLabeling {
        component_of: ds.labeling(),
        count,
    }
}
