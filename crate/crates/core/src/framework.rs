//! Top-level drivers: single-sink vertex connectivity over clusters, the
//! reduction from global connectivity to sampled sinks, and bipartite vertex
//! cover through global connectivity.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{com_nei_clustering, ClusterConfig};
use crate::error::{invalid, Result};
use crate::graph::{Graph, VertexCut};
use crate::isolating::isolating_cuts;
use crate::matching::{BipartiteInstance, Capacity};
use crate::minnncc::{min_nncc_below, sample_count, MinNnccConfig};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub seed: u64,
    /// Independent repetitions of the whole single-sink procedure.
    pub boost: usize,
    /// Cap on sampled sinks for global connectivity.
    pub max_sinks: Option<usize>,
    /// Compare answers against an oracle where one applies.
    pub verify: bool,
    pub clustering: ClusterConfig,
    pub minnncc: MinNnccConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            boost: 1,
            max_sinks: None,
            verify: false,
            clustering: ClusterConfig::default(),
            minnncc: MinNnccConfig::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.boost == 0 {
            return invalid("boost must be at least 1");
        }
        if self.max_sinks == Some(0) {
            return invalid("max_sinks must be at least 1");
        }
        if !(self.minnncc.sample_mult > 0.0 && self.minnncc.sample_mult.is_finite()) {
            return invalid("sample_mult must be positive");
        }
        if let Some(p) = self.clustering.center_prob {
            if !(p > 0.0 && p <= 1.0) {
                return invalid("center_prob must lie in (0, 1]");
            }
        }
        if self.clustering.boost == Some(0) {
            return invalid("clustering boost must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Disconnected,
    Degenerate,
    MinDegree,
    IsolatingCuts,
    MinNncc,
    Sink,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub run: usize,
    pub ell: usize,
    pub clusters: usize,
    pub best: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SsvcResult {
    pub cut: VertexCut,
    pub origin: Origin,
    pub levels: Vec<LevelReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlobalResult {
    pub cut: VertexCut,
    pub origin: Origin,
    pub sinks: Vec<usize>,
    pub per_sink: Vec<usize>,
}

type ClusterKey = (usize, usize, Vec<usize>);
type ClusterAnswer = Option<(Vec<usize>, usize, Origin)>;
type CoverCache = HashMap<(usize, usize), Arc<Vec<Vec<usize>>>>;

/// Work shared between sinks of one global call: covers depend only on
/// `(run, level)` and per-cluster answers only on the trimmed cluster.
#[derive(Default)]
struct Workspace {
    covers: Mutex<CoverCache>,
    answers: Mutex<HashMap<ClusterKey, (usize, ClusterAnswer)>>,
}

fn log2(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}

fn set_hash(set: &[usize]) -> u64 {
    set.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &v| rng::mix(h ^ v as u64))
}

fn better(a: Option<(VertexCut, Origin)>, b: (VertexCut, Origin)) -> Option<(VertexCut, Origin)> {
    match a {
        Some(a) if a.0.key() <= b.0.key() => Some(a),
        _ => Some(b),
    }
}

/// Terminal sampling rate at level `ℓ`, floored at `1/n`.
pub fn terminal_prob(n: usize, ell: usize) -> f64 {
    let p = 1.0 / (ell as f64 * 2f64.powf(log2(n).powf(0.8)));
    p.max(1.0 / n.max(1) as f64).min(1.0)
}

/// Drop the higher endpoint of every edge inside `t`.
pub fn prune_independent(g: &Graph, t: &[usize]) -> Vec<usize> {
    let mut in_t = vec![false; g.n()];
    for &v in t {
        in_t[v] = true;
    }
    t.iter().copied().filter(|&v| !g.neighbors(v).iter().any(|&u| u < v && in_t[u])).collect()
}

/// Best side found inside `c`, skipping work that cannot go below `bound`:
/// a side through `x ∈ C` always has at least `|N(x) \ C|` neighbors.
fn solve_cluster(g: &Graph, c: &[usize], ell: usize, cfg: &SolverConfig, seed: u64, bound: usize) -> Result<ClusterAnswer> {
    let mut best: ClusterAnswer = None;
    let q = terminal_prob(g.n(), ell);
    let mut r = rng::rng(seed, &[0x7e]);
    let sampled: Vec<usize> = c.iter().copied().filter(|_| r.gen_bool(q)).collect();
    let terminals = prune_independent(g, &sampled);
    let outside = |x: usize| g.neighbors(x).iter().filter(|v| c.binary_search(v).is_err()).count();
    if terminals.len() >= 2 && terminals.iter().any(|&x| outside(x) < bound) {
        let res = isolating_cuts(g, c, &terminals)?;
        let cut = res.best_cut();
        best = Some((cut.left.clone(), cut.size(), Origin::IsolatingCuts));
    }
    let bound = best.as_ref().map_or(bound, |b| b.1.min(bound));
    if let Some(res) = min_nncc_below(g, c, ell, &cfg.minnncc, rng::derive(seed, &[0x3c]), bound)? {
        if best.as_ref().is_none_or(|b| res.size < b.1) {
            best = Some((res.left, res.size, Origin::MinNncc));
        }
    }
    Ok(best)
}

fn ssvc_in(g: &Graph, t: usize, cfg: &SolverConfig, ws: &Workspace) -> Result<SsvcResult> {
    let n = g.n();
    if t >= n {
        return invalid(format!("sink {t} out of range"));
    }
    let mut blocked = vec![false; n];
    let t_comp = g.component_avoiding(t, &blocked);
    if t_comp.len() < n {
        let mut in_comp = vec![false; n];
        for &v in &t_comp {
            in_comp[v] = true;
        }
        let other = (0..n).find(|&v| !in_comp[v]).expect("vertex outside the sink component");
        let left = g.component_avoiding(other, &blocked);
        return Ok(SsvcResult { cut: VertexCut::from_left(g, &left), origin: Origin::Disconnected, levels: vec![] });
    }
    blocked[t] = true;
    for &u in g.neighbors(t) {
        blocked[u] = true;
    }
    let Some(v) = (0..n).filter(|&v| !blocked[v]).min_by_key(|&v| (g.degree(v), v)) else {
        return Ok(SsvcResult { cut: VertexCut::degenerate_for_sink(n, t), origin: Origin::Degenerate, levels: vec![] });
    };
    let mut best = Some((VertexCut::from_left(g, &[v]), Origin::MinDegree));
    let mut levels = Vec::new();
    let top = log2(n).ceil() as usize;
    for run in 0..cfg.boost {
        for i in 0..=top {
            let ell = 1usize << i;
            let cluster_ell = (2 * ell).min(n - 1).max(1);
            let cover = {
                let key = (run, cluster_ell);
                let cached = ws.covers.lock().expect("cover cache").get(&key).cloned();
                match cached {
                    Some(c) => c,
                    None => {
                        let seed = rng::derive(cfg.seed, &[run as u64, cluster_ell as u64]);
                        let cover = Arc::new(com_nei_clustering(g, cluster_ell, &cfg.clustering, seed)?.distinct());
                        ws.covers.lock().expect("cover cache").insert(key, Arc::clone(&cover));
                        cover
                    }
                }
            };
            let mut trimmed: Vec<Vec<usize>> = cover
                .iter()
                .map(|c| c.iter().copied().filter(|&v| !blocked[v]).collect::<Vec<_>>())
                .filter(|c| !c.is_empty())
                .collect();
            trimmed.sort();
            trimmed.dedup();
            let trimmed = drop_dominated(trimmed, n, ell, &cfg.minnncc);
            let bound = best.as_ref().map_or(usize::MAX, |b| b.0.size);
            let answers: Vec<ClusterAnswer> = trimmed
                .par_iter()
                .map(|c| {
                    let key = (run, ell, c.clone());
                    if let Some((used, a)) = ws.answers.lock().expect("answer cache").get(&key) {
                        // A search cut off at a smaller bound may have missed answers below ours.
                        if *used >= bound || a.as_ref().is_some_and(|a| a.1 < bound) {
                            return Ok(a.clone());
                        }
                    }
                    let seed = rng::derive(cfg.seed, &[run as u64, ell as u64, set_hash(c)]);
                    let a = solve_cluster(g, c, ell, cfg, seed, bound)?;
                    ws.answers.lock().expect("answer cache").insert(key, (bound, a.clone()));
                    Ok(a)
                })
                .collect::<Result<_>>()?;
            let mut level_best = None;
            for (left, size, origin) in answers.into_iter().flatten() {
                level_best = Some(level_best.map_or(size, |b: usize| b.min(size)));
                best = better(best, (VertexCut::from_left(g, &left), origin));
            }
            levels.push(LevelReport { run, ell, clusters: trimmed.len(), best: level_best });
        }
    }
    let (cut, origin) = best.expect("baseline cut");
    Ok(SsvcResult { cut, origin, levels })
}

/// Drop clusters contained in a larger cluster whose every vertex is a
/// sampled source: that cluster's answer is already the minimum over all of
/// its subsets.
fn drop_dominated(mut clusters: Vec<Vec<usize>>, n: usize, ell: usize, cfg: &MinNnccConfig) -> Vec<Vec<usize>> {
    clusters.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let words = n.div_ceil(64);
    let mut full: Vec<Vec<u64>> = Vec::new();
    let mut kept = Vec::with_capacity(clusters.len());
    for c in clusters {
        let mut bits = vec![0u64; words];
        for &v in &c {
            bits[v / 64] |= 1 << (v % 64);
        }
        if full.iter().any(|f| f.iter().zip(&bits).all(|(a, b)| b & !a == 0)) {
            continue;
        }
        if sample_count(c.len(), n, ell, cfg) == c.len() {
            full.push(bits);
        }
        kept.push(c);
    }
    kept.sort();
    kept
}

/// Minimum vertex cut with `t` on the right side.
pub fn ssvc(g: &Graph, t: usize, cfg: &SolverConfig) -> Result<SsvcResult> {
    cfg.validate()?;
    ssvc_in(g, t, cfg, &Workspace::default())
}

/// Number of sinks sampled for a graph with `n` vertices and minimum degree `delta`.
pub fn sink_count(n: usize, delta: usize, cfg: &SolverConfig) -> usize {
    let gap = (n - delta) as f64;
    let z = ((10.0 * n as f64 * log2(n) / gap).ceil() as usize).min(n);
    let cap = cfg
        .max_sinks
        .unwrap_or(if 2 * (n - delta) >= n { 4 * log2(n).ceil() as usize } else { z });
    z.min(cap).min(n).max(1)
}

/// Global vertex connectivity with a witness cut.
pub fn global_vc(g: &Graph, cfg: &SolverConfig) -> Result<GlobalResult> {
    cfg.validate()?;
    let n = g.n();
    if n < 2 {
        return invalid("global connectivity needs n >= 2");
    }
    let comps = g.components();
    if comps.len() > 1 {
        let cut = VertexCut::from_left(g, &comps[1]);
        return Ok(GlobalResult { cut, origin: Origin::Disconnected, sinks: vec![], per_sink: vec![] });
    }
    let (v, delta) = g.min_degree().expect("n >= 2");
    if delta == n - 1 {
        return Ok(GlobalResult { cut: VertexCut::degenerate(n), origin: Origin::Degenerate, sinks: vec![], per_sink: vec![] });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::rng(cfg.seed, &[0x51c]));
    let mut sinks: Vec<usize> = order[..sink_count(n, delta, cfg)].to_vec();
    sinks.sort_unstable();
    let ws = Workspace::default();
    let results: Vec<SsvcResult> = sinks.par_iter().map(|&s| ssvc_in(g, s, cfg, &ws)).collect::<Result<_>>()?;
    let mut best = Some((VertexCut::from_left(g, &[v]), Origin::MinDegree));
    let per_sink = results.iter().map(|r| r.cut.size).collect();
    for r in results {
        best = better(best, (r.cut, Origin::Sink));
    }
    let (cut, origin) = best.expect("baseline cut");
    Ok(GlobalResult { cut, origin, sinks, per_sink })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BipartiteCover {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl BipartiteCover {
    pub fn size(&self) -> usize {
        self.left.len() + self.right.len()
    }
}

/// Minimum vertex cover of a bipartite graph through global connectivity of
/// the graph with cliques added on both sides.
pub fn bmc_via_vc(inst: &BipartiteInstance, cfg: &SolverConfig) -> Result<BipartiteCover> {
    if inst.left_cap.iter().chain(&inst.right_cap).any(|&c| c != Capacity::Unit) {
        return invalid("bipartite cover needs unit capacities");
    }
    let (a, b) = (inst.left, inst.right);
    let smaller = || {
        if a <= b {
            BipartiteCover { left: (0..a).collect(), right: vec![] }
        } else {
            BipartiteCover { left: vec![], right: (0..b).collect() }
        }
    };
    if a == 0 || b == 0 {
        return Ok(BipartiteCover { left: vec![], right: vec![] });
    }
    if inst.edges.iter().any(|&(l, r)| l >= a || r >= b) {
        return invalid("edge endpoint out of range");
    }
    let mut edges: Vec<(usize, usize)> = inst.edges.iter().map(|&(l, r)| (l, a + r)).collect();
    for side in [0..a, a..a + b] {
        for u in side.clone() {
            for v in u + 1..side.end {
                edges.push((u, v));
            }
        }
    }
    let g = Graph::from_edges(a + b, edges)?;
    let res = global_vc(&g, cfg)?;
    if res.cut.size < a.min(b) {
        let (left, right): (Vec<usize>, Vec<usize>) = res.cut.separator.iter().partition(|&&v| v < a);
        Ok(BipartiteCover { left, right: right.into_iter().map(|v| v - a).collect() })
    } else {
        Ok(smaller())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_cut;

    fn cfg() -> SolverConfig {
        SolverConfig { seed: 11, ..Default::default() }
    }

    #[test]
    fn star_leaf_sink() {
        let g = Graph::from_edges(5, (1..5).map(|v| (0, v))).unwrap();
        let res = ssvc(&g, 1, &cfg()).unwrap();
        assert_eq!(res.cut.size, 1);
        assert!(res.cut.right.contains(&1));
        assert_eq!(validate_cut(&g, &res.cut), Ok(true));
    }

    #[test]
    fn complete_graph_is_degenerate() {
        let g = Graph::from_edges(4, (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b)))).unwrap();
        let res = global_vc(&g, &cfg()).unwrap();
        assert_eq!(res.cut.size, 3);
        assert_eq!(validate_cut(&g, &res.cut), Ok(true));
    }

    #[test]
    fn path_has_a_cut_vertex() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(global_vc(&g, &cfg()).unwrap().cut.size, 1);
    }

    #[test]
    fn bipartite_examples() {
        let k22 = BipartiteInstance::unit(2, 2, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(bmc_via_vc(&k22, &cfg()).unwrap().size(), 2);
        let star = BipartiteInstance::unit(1, 3, vec![(0, 0), (0, 1), (0, 2)]);
        assert_eq!(bmc_via_vc(&star, &cfg()).unwrap(), BipartiteCover { left: vec![0], right: vec![] });
    }

    #[test]
    fn pruning_keeps_lower_endpoint() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(prune_independent(&g, &[0, 1, 2, 3]), vec![0, 3]);
    }

    #[test]
    fn bad_sink_and_tiny_graph() {
        let g = Graph::new(1);
        assert!(global_vc(&g, &cfg()).is_err());
        assert!(ssvc(&Graph::new(3), 5, &cfg()).is_err());
    }
}
