//! Seeded instance generators and brute-force oracles shared by the
//! integration tests. Each `check_*` builds one random instance from `seed`
//! and compares the library against an independent reference.

#![allow(dead_code)]

use pknng::cluster::{accuracy, hierarchical, mst_cluster, pam, pam_objective, ClusterAssignment, Linkage};
use pknng::knn::knn_lists;
use pknng::{
    apsp_dijkstra, apsp_floyd_warshall, build_knn_graph, components, connect_graph, pknng_metric,
    prune_outlier_edges, ConnectorConfig, DissimilarityMatrix, Edge, EdgeKind, Execution, Penalty, PointSet,
    Scheme, SeededRng, WeightedGraph,
};
use rand::Rng;

pub type Check = Result<(), String>;

pub const SCHEMES: [Scheme; 4] = [Scheme::MinSpan, Scheme::AllSubGraphs, Scheme::AllEdges, Scheme::Medoids];

/// Connected graph: random spanning tree plus extra edges.
pub fn random_connected_graph(rng: &mut SeededRng, n: usize) -> WeightedGraph {
    let mut edges = std::collections::BTreeMap::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.insert((u, v), rng.random_range(0.1..10.0));
    }
    let extra = rng.random_range(0..=n * 2);
    for _ in 0..extra {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b {
            edges.insert((a.min(b), a.max(b)), rng.random_range(0.1..10.0));
        }
    }
    WeightedGraph::from_edges(
        n,
        edges.into_iter().map(|((a, b), w)| Edge::new(a, b, w, EdgeKind::Original, false)),
    )
    .unwrap()
}

pub fn random_points(rng: &mut SeededRng, n: usize, dim: usize) -> PointSet {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    PointSet::from_rows(&rows).unwrap()
}

/// Points in `blobs` tight clusters placed far apart, so small-k
/// neighbor graphs tend to fall apart into several components.
pub fn blob_points(rng: &mut SeededRng, n: usize, blobs: usize) -> PointSet {
    let centers: Vec<[f64; 2]> = (0..blobs).map(|_| [rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)]).collect();
    let rows: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let c = centers[i % blobs];
            [c[0] + rng.random_range(-1.0..1.0), c[1] + rng.random_range(-1.0..1.0)]
        })
        .collect();
    PointSet::from_rows(&rows).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn check_dijkstra_floyd(seed: u64) -> Check {
    let mut rng = SeededRng::new(seed);
    let n = rng.random_range(1..=60);
    let g = random_connected_graph(&mut rng, n);
    let a = apsp_dijkstra(&g).map_err(|e| e.to_string())?;
    let b = apsp_floyd_warshall(&g).map_err(|e| e.to_string())?;
    let diff = a.max_abs_diff(&b);
    if diff <= 1e-9 {
        Ok(())
    } else {
        Err(format!("seed {seed}: n={n} max diff {diff}"))
    }
}

/// Shortest simple-path length by depth-first enumeration of every path.
pub fn enumerate_paths(g: &WeightedGraph) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut best = vec![vec![f64::INFINITY; n]; n];
    fn dfs(g: &WeightedGraph, s: usize, v: usize, len: f64, seen: &mut Vec<bool>, best: &mut [Vec<f64>]) {
        if len < best[s][v] {
            best[s][v] = len;
        }
        for &(u, w) in g.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                dfs(g, s, u, len + w, seen, best);
                seen[u] = false;
            }
        }
    }
    for s in 0..n {
        let mut seen = vec![false; n];
        seen[s] = true;
        dfs(g, s, s, 0.0, &mut seen, &mut best);
    }
    best
}

pub fn check_floyd_paths(seed: u64) -> Check {
    let mut rng = SeededRng::new(seed);
    let n = rng.random_range(1..=8);
    let g = random_connected_graph(&mut rng, n);
    let fw = apsp_floyd_warshall(&g).map_err(|e| e.to_string())?;
    let brute = enumerate_paths(&g);
    for i in 0..n {
        for j in 0..n {
            if !close(fw.get(i, j), brute[i][j], 1e-12) {
                return Err(format!("seed {seed}: ({i},{j}) floyd {} paths {}", fw.get(i, j), brute[i][j]));
            }
        }
    }
    Ok(())
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for v in start..n {
        cur.push(v);
        subsets(n, k, v + 1, cur, out);
        cur.pop();
    }
}

/// Smallest total distance to the nearest medoid over every `k`-subset.
pub fn exhaustive_medoid_cost(d: &DissimilarityMatrix, k: usize) -> f64 {
    let mut all = Vec::new();
    subsets(d.n(), k, 0, &mut Vec::new(), &mut all);
    all.iter()
        .map(|m| (0..d.n()).map(|i| m.iter().map(|&c| d.get(i, c)).fold(f64::INFINITY, f64::min)).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

pub fn random_euclidean(rng: &mut SeededRng, n: usize) -> DissimilarityMatrix {
    let dim = rng.random_range(1..=4);
    let ps = random_points(rng, n, dim);
    DissimilarityMatrix::from_fn(n, |i, j| ps.dist(i, j)).unwrap()
}

pub fn check_pam_exhaustive(seed: u64) -> Check {
    let mut rng = SeededRng::new(seed);
    let n = rng.random_range(3..=12);
    let k = rng.random_range(1..=3);
    let d = random_euclidean(&mut rng, n);
    let got = pam(&d, k).map_err(|e| e.to_string())?;
    let medoids = got.medoids.clone().ok_or("pam returned no medoids")?;
    let cost = pam_objective(&d, &medoids);
    let best = exhaustive_medoid_cost(&d, k);
    if close(cost, best, 1e-12) {
        Ok(())
    } else {
        Err(format!("seed {seed}: n={n} k={k} pam {cost} exhaustive {best}"))
    }
}

/// What SWAP guarantees: no single medoid exchange lowers the cost, and the
/// cost never undercuts the exhaustive optimum.
pub fn check_pam_local(seed: u64) -> Check {
    let mut rng = SeededRng::new(seed);
    let n = rng.random_range(3..=12);
    let k = rng.random_range(1..=3);
    let d = random_euclidean(&mut rng, n);
    let medoids = pam(&d, k).map_err(|e| e.to_string())?.medoids.ok_or("pam returned no medoids")?;
    let cost = pam_objective(&d, &medoids);
    if cost < exhaustive_medoid_cost(&d, k) * (1.0 - 1e-12) {
        return Err(format!("seed {seed}: pam below the exhaustive optimum"));
    }
    for pos in 0..k {
        for h in (0..n).filter(|h| !medoids.contains(h)) {
            let mut t = medoids.clone();
            t[pos] = h;
            if pam_objective(&d, &t) < cost * (1.0 - 1e-12) {
                return Err(format!("seed {seed}: swapping medoid {pos} for {h} improves"));
            }
        }
    }
    Ok(())
}

/// Dense relabeling by first appearance, so partitions compare with `==`.
pub fn canonical(labels: &[usize]) -> Vec<usize> {
    ClusterAssignment::from_labels(labels).labels
}

pub fn check_single_linkage_mst(seed: u64) -> Check {
    let mut rng = SeededRng::new(seed);
    let n = rng.random_range(2..=30);
    let d = random_euclidean(&mut rng, n);
    for k in 1..=n {
        let hc = hierarchical(&d, k, Linkage::Single).map_err(|e| e.to_string())?;
        let mst = mst_cluster(&d, k).map_err(|e| e.to_string())?;
        if canonical(&hc.labels) != canonical(&mst.labels) {
            return Err(format!("seed {seed}: n={n} k={k} partitions differ"));
        }
    }
    Ok(())
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out
}

/// Best matched fraction over every cluster-to-class permutation.
pub fn brute_accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    let m = pred.iter().chain(truth).max().map_or(0, |x| x + 1);
    let best = permutations(m)
        .iter()
        .map(|p| pred.iter().zip(truth).filter(|&(&a, &b)| p[a] == b).count())
        .max()
        .unwrap_or(0);
    best as f64 / pred.len() as f64
}

pub fn check_accuracy(seed: u64) -> Check {
    let mut rng = SeededRng::new(seed);
    let n = rng.random_range(1..=40);
    let classes = rng.random_range(1..=5);
    let clusters = rng.random_range(1..=5);
    let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..classes)).collect();
    let pred: Vec<usize> = (0..n).map(|_| rng.random_range(0..clusters)).collect();
    let got = accuracy(&ClusterAssignment::from_labels(&pred), &truth).map_err(|e| e.to_string())?;
    let want = brute_accuracy(&pred, &truth);
    if close(got, want, 1e-12) {
        Ok(())
    } else {
        Err(format!("seed {seed}: accuracy {got} brute force {want}"))
    }
}

pub fn check_knn(seed: u64) -> Check {
    let mut rng = SeededRng::new(seed);
    let n = rng.random_range(2..=80);
    let dim = rng.random_range(1..=6);
    let k = rng.random_range(1..n);
    let ps = random_points(&mut rng, n, dim);
    let got = knn_lists(&ps, k, Execution::Sequential).map_err(|e| e.to_string())?;
    for v in 0..n {
        let mut all: Vec<(f64, usize)> = (0..n).filter(|&u| u != v).map(|u| (ps.dist(v, u), u)).collect();
        all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let want: Vec<usize> = all[..k].iter().map(|p| p.1).collect();
        if got[v] != want {
            return Err(format!("seed {seed}: vertex {v} got {:?} want {want:?}", got[v]));
        }
    }
    Ok(())
}

pub fn check_metric_axioms(seed: u64) -> Check {
    let mut rng = SeededRng::new(seed);
    let n = rng.random_range(8..=60);
    let ps = if rng.random_bool(0.5) {
        let blobs = rng.random_range(1..=4);
        blob_points(&mut rng, n, blobs)
    } else {
        let dim = rng.random_range(1..=5);
        random_points(&mut rng, n, dim)
    };
    let k = rng.random_range(2..=6);
    let scheme = SCHEMES[rng.random_range(0..4)];
    let penalty = [Penalty::Exponential, Penalty::ExponentialShifted, Penalty::Plain][rng.random_range(0..3)];
    let d = pknng_metric(&ps, k, &ConnectorConfig::new(scheme, penalty)).map_err(|e| e.to_string())?;
    for i in 0..n {
        if d.get(i, i) != 0.0 {
            return Err(format!("seed {seed}: diagonal {i} = {}", d.get(i, i)));
        }
        for j in 0..n {
            let dij = d.get(i, j);
            if dij != d.get(j, i) || !dij.is_finite() {
                return Err(format!("seed {seed}: ({i},{j}) asymmetric or infinite"));
            }
            for m in 0..n {
                let via = d.get(i, m) + d.get(m, j);
                if dij > via * (1.0 + 1e-12) {
                    return Err(format!("seed {seed}: triangle ({i},{m},{j}) {dij} > {via}"));
                }
            }
        }
    }
    Ok(())
}

/// Pruned knn-graph of blob points with at least two components.
pub fn random_disconnected(seed: u64) -> (PointSet, WeightedGraph, usize) {
    let mut rng = SeededRng::new(seed);
    loop {
        let blobs = rng.random_range(2..=5);
        let n = rng.random_range(blobs * 4..=60);
        let ps = blob_points(&mut rng, n, blobs);
        let k = rng.random_range(1..=3);
        let g = prune_outlier_edges(&build_knn_graph(&ps, k).unwrap().graph);
        let c = components(&g).count;
        if c >= 2 {
            return (ps, g, c);
        }
    }
}

/// Breadth-first reachability over every edge kind.
pub fn connected(g: &WeightedGraph) -> bool {
    let mut seen = vec![false; g.n()];
    let mut queue = std::collections::VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &(u, _) in g.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn added(g: &WeightedGraph) -> std::collections::HashSet<(usize, usize)> {
    g.edges_of_kind(EdgeKind::Added).map(|e| (e.i, e.j)).collect()
}

pub fn check_structure(seed: u64) -> Check {
    let (ps, g, c) = random_disconnected(seed);
    let cfg = |s| ConnectorConfig::new(s, Penalty::Exponential);
    let minspan = connect_graph(&g, &ps, &cfg(Scheme::MinSpan)).map_err(|e| e.to_string())?;
    let all_sub = connect_graph(&g, &ps, &cfg(Scheme::AllSubGraphs)).map_err(|e| e.to_string())?;
    let (ms, asg) = (added(&minspan), added(&all_sub));
    if ms.len() != c - 1 {
        return Err(format!("seed {seed}: {c} components but MinSpan added {}", ms.len()));
    }
    if !ms.is_subset(&asg) {
        return Err(format!("seed {seed}: MinSpan edges not within AllSubGraphs"));
    }
    for s in SCHEMES {
        let out = connect_graph(&g, &ps, &cfg(s)).map_err(|e| e.to_string())?;
        if !connected(&out) {
            return Err(format!("seed {seed}: {s} left the graph disconnected"));
        }
        // Original edges are kept untouched.
        let orig: Vec<_> = out.edges_of_kind(EdgeKind::Original).map(|e| (e.i, e.j, e.weight)).collect();
        let want: Vec<_> = g.edges().iter().map(|e| (e.i, e.j, e.weight)).collect();
        if orig != want {
            return Err(format!("seed {seed}: {s} changed original edges"));
        }
    }
    Ok(())
}

/// Run `check` for seeds `0..count`, collecting failures.
pub fn run_many(name: &str, count: u64, check: impl Fn(u64) -> Check) -> Vec<String> {
    (0..count)
        .filter_map(|i| check(pknng::derive_seed(0, name, i)).err())
        .collect()
}
