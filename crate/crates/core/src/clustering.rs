//! Common-neighborhood clustering: randomized ball growing where balls are
//! measured by neighborhood difference `|N(u) △ N(v)|` instead of distance.
//!
//! For a target `ℓ`, every connected `L` with `|N(u) △ N(v)| ≤ ℓ` for all
//! `u, v ∈ L` should land inside some recorded cluster in a constant fraction
//! of runs; boosting repeats the whole schedule and takes the union.

use std::collections::{BTreeSet, HashSet};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::rng;
use crate::sketch::{DifferenceOracle, ExactDifference};

/// Schedule overrides; `None` picks the size-dependent default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterConfig {
    /// Independent runs unioned together (default `⌈log² n⌉`).
    pub boost: Option<usize>,
    /// Largest outer scale index `i` (default `⌈log log n⌉ + 2`).
    pub outer_levels: Option<usize>,
    /// Largest contraction round `t1` (default `⌈log^0.3 n⌉`).
    pub t1_rounds: Option<usize>,
    /// Growth rounds per phase (default `min(n, ⌈2^(log^0.9 n)⌉)`).
    pub t2_rounds: Option<usize>,
    /// Probability that a piece becomes a contraction center
    /// (default `max(1/n, 2^-⌈log^0.8 n⌉)`).
    pub center_prob: Option<f64>,
    /// Reported cap on a cluster's neighborhood difference
    /// (default `9^(t1max + 1) · d_max`).
    pub diff_cap: Option<f64>,
}

/// Fully resolved schedule for one `(n, ℓ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    pub n: usize,
    pub ell: usize,
    pub boost: usize,
    pub i_max: usize,
    pub j_max: usize,
    pub t1_max: usize,
    pub t2_max: usize,
    pub center_prob: f64,
    pub diff_cap: f64,
}

impl Schedule {
    pub fn resolve(n: usize, ell: usize, cfg: &ClusterConfig) -> Self {
        let log = (n.max(2) as f64).log2();
        let i_max = cfg.outer_levels.unwrap_or_else(|| log.log2().max(0.0).ceil() as usize + 2);
        let t1_max = cfg.t1_rounds.unwrap_or_else(|| log.powf(0.3).ceil() as usize);
        let t2_max = cfg.t2_rounds.unwrap_or_else(|| {
            let r = 2f64.powf(log.powf(0.9)).ceil();
            (r.min(n as f64) as usize).max(1)
        });
        let center_prob = cfg
            .center_prob
            .unwrap_or_else(|| 2f64.powf(-log.powf(0.8).ceil()).max(1.0 / n.max(1) as f64));
        let d_max = Self::scale(i_max, log, ell);
        let diff_cap = cfg.diff_cap.unwrap_or_else(|| 9f64.powi(t1_max as i32 + 1) * d_max);
        Schedule {
            n,
            ell,
            boost: cfg.boost.unwrap_or_else(|| (log * log).ceil() as usize).max(1),
            i_max,
            j_max: log.ceil() as usize,
            t1_max,
            t2_max,
            center_prob,
            diff_cap,
        }
    }

    /// `d = 2^(i √log n) · ℓ`.
    fn scale(i: usize, log: f64, ell: usize) -> f64 {
        2f64.powf(i as f64 * log.sqrt()) * ell as f64
    }

    /// Number of `(i, j, t1)` iterations in one run.
    pub fn iterations(&self) -> usize {
        (self.i_max + 1) * (self.j_max + 1) * (self.t1_max + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cluster {
    pub vertices: Vec<usize>,
    pub center: usize,
    pub run: usize,
    pub i: usize,
    pub j: usize,
    pub t1: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterCover {
    pub schedule: Schedule,
    pub clusters: Vec<Cluster>,
}

impl ClusterCover {
    /// Distinct vertex sets, sorted.
    pub fn distinct(&self) -> Vec<Vec<usize>> {
        let set: BTreeSet<&Vec<usize>> = self.clusters.iter().map(|c| &c.vertices).collect();
        set.into_iter().cloned().collect()
    }

    /// Clusters recorded by one boosting run.
    pub fn run(&self, run: usize) -> impl Iterator<Item = &Cluster> {
        self.clusters.iter().filter(move |c| c.run == run)
    }

    /// Whether some cluster contains all of `set`.
    pub fn covers(&self, set: &[usize]) -> bool {
        self.clusters.iter().any(|c| set.iter().all(|v| c.vertices.binary_search(v).is_ok()))
    }
}

/// Clustering with exact neighborhood differences.
pub fn com_nei_clustering(g: &Graph, ell: usize, cfg: &ClusterConfig, seed: u64) -> Result<ClusterCover> {
    com_nei_clustering_with(g, ell, cfg, seed, &ExactDifference)
}

pub fn com_nei_clustering_with(
    g: &Graph,
    ell: usize,
    cfg: &ClusterConfig,
    seed: u64,
    apd: &dyn DifferenceOracle,
) -> Result<ClusterCover> {
    let n = g.n();
    if n == 0 {
        return invalid("clustering needs a nonempty graph");
    }
    if ell < 1 || (n > 1 && ell >= n) {
        return invalid(format!("ell = {ell} must satisfy 1 <= ell < n = {n}"));
    }
    let schedule = Schedule::resolve(n, ell, cfg);
    let mut clusters = Vec::new();
    for run in 0..schedule.boost {
        clusters.extend(clustering_run(g, &schedule, rng::derive(seed, &[run as u64]), run, apd));
    }
    Ok(ClusterCover { schedule, clusters })
}

struct Territory {
    center: usize,
    vertices: Vec<usize>,
    frontier: Vec<usize>,
    rejected: HashSet<usize>,
}

/// Grow territories by absorbing adjacent live pieces whose smallest vertex is
/// within `threshold` of the territory's center.
#[allow(clippy::too_many_arguments)]
fn grow(
    g: &Graph,
    pieces: &[Vec<usize>],
    piece_of: &[usize],
    alive: &mut [bool],
    territories: &mut [Territory],
    threshold: f64,
    rounds: usize,
    apd: &dyn DifferenceOracle,
) {
    for _ in 0..rounds {
        let mut changed = false;
        for t in territories.iter_mut() {
            let frontier = std::mem::take(&mut t.frontier);
            for v in frontier {
                for &w in g.neighbors(v) {
                    let p = piece_of[w];
                    if p == usize::MAX || !alive[p] || t.rejected.contains(&p) {
                        continue;
                    }
                    if apd.apd(g, t.center, pieces[p][0]) <= threshold {
                        alive[p] = false;
                        t.vertices.extend_from_slice(&pieces[p]);
                        t.frontier.extend_from_slice(&pieces[p]);
                        changed = true;
                    } else {
                        t.rejected.insert(p);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

fn piece_index(n: usize, pieces: &[Vec<usize>]) -> Vec<usize> {
    let mut piece_of = vec![usize::MAX; n];
    for (p, piece) in pieces.iter().enumerate() {
        for &v in piece {
            piece_of[v] = p;
        }
    }
    piece_of
}

/// One run of the full `(i, j, t1)` schedule.
pub fn clustering_run(g: &Graph, s: &Schedule, seed: u64, run: usize, apd: &dyn DifferenceOracle) -> Vec<Cluster> {
    let n = g.n();
    let log = (n.max(2) as f64).log2();
    let mut out = Vec::new();
    for i in 0..=s.i_max {
        let d = Schedule::scale(i, log, s.ell);
        for j in 0..=s.j_max {
            let mut r = rng::rng(seed, &[i as u64, j as u64]);
            let p_center = 1.0 / (1u64 << j.min(62)) as f64;
            let centers: Vec<usize> = (0..n).filter(|_| r.gen_bool(p_center)).collect();
            let mut pieces: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
            for t1 in 0..=s.t1_max {
                let threshold = 9f64.powi(t1 as i32) * d;
                let piece_of = piece_index(n, &pieces);

                let mut alive = vec![true; pieces.len()];
                let mut territories = Vec::new();
                for &u in &centers {
                    let p = piece_of[u];
                    if p != usize::MAX && alive[p] {
                        alive[p] = false;
                        territories.push(Territory {
                            center: u,
                            vertices: pieces[p].clone(),
                            frontier: pieces[p].clone(),
                            rejected: HashSet::new(),
                        });
                    }
                }
                grow(g, &pieces, &piece_of, &mut alive, &mut territories, threshold, s.t2_max, apd);
                for t in territories {
                    let mut vertices = t.vertices;
                    vertices.sort_unstable();
                    out.push(Cluster { vertices, center: t.center, run, i, j, t1 });
                }

                if t1 == s.t1_max {
                    break;
                }
                let mut alive = vec![true; pieces.len()];
                let mut territories = Vec::new();
                for (p, piece) in pieces.iter().enumerate() {
                    if r.gen_bool(s.center_prob) {
                        alive[p] = false;
                        territories.push(Territory {
                            center: piece[0],
                            vertices: piece.clone(),
                            frontier: piece.clone(),
                            rejected: HashSet::new(),
                        });
                    }
                }
                grow(g, &pieces, &piece_of, &mut alive, &mut territories, threshold, s.t2_max, apd);
                pieces = territories
                    .into_iter()
                    .map(|t| {
                        let mut v = t.vertices;
                        v.sort_unstable();
                        v
                    })
                    .collect();
            }
        }
    }
    out
}

/// Largest `|N(u) △ N(v)|` over pairs in `set`, exact.
pub fn max_pairwise_difference(g: &Graph, set: &[usize]) -> usize {
    let mut best = 0;
    for (a, &u) in set.iter().enumerate() {
        for &v in &set[a + 1..] {
            best = best.max(g.neighborhood_symmetric_difference(u, v).len());
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverReport {
    /// `L` is nonempty, connected, with pairwise neighborhood difference `≤ ℓ`.
    pub precondition: bool,
    pub covered: bool,
    /// Fraction of runs in which some cluster contains `L`.
    pub cover_rate: f64,
    pub iterations_per_run: usize,
    pub max_multiplicity: usize,
    pub disjoint_within_iteration: bool,
    /// Clusters whose neighborhood difference exceeds the schedule cap.
    pub over_cap: usize,
}

/// Audit a cover: disjointness per iteration, multiplicity, the difference
/// cap, and whether `L` is covered.
pub fn check_cover_properties(g: &Graph, cover: &ClusterCover, l: &[usize]) -> CoverReport {
    let s = &cover.schedule;
    let precondition = g.is_connected_set(l) && max_pairwise_difference(g, l) <= s.ell;
    let mut disjoint = true;
    let mut max_mult = 0;
    let mut runs_covering = 0;
    for run in 0..s.boost {
        let mut mult = vec![0usize; g.n()];
        let mut seen_in_iter: std::collections::HashMap<(usize, usize, usize), Vec<bool>> = Default::default();
        let mut covered_here = false;
        for c in cover.run(run) {
            let marks = seen_in_iter.entry((c.i, c.j, c.t1)).or_insert_with(|| vec![false; g.n()]);
            for &v in &c.vertices {
                if marks[v] {
                    disjoint = false;
                }
                marks[v] = true;
                mult[v] += 1;
            }
            if !covered_here && l.iter().all(|v| c.vertices.binary_search(v).is_ok()) {
                covered_here = true;
            }
        }
        runs_covering += covered_here as usize;
        max_mult = max_mult.max(mult.into_iter().max().unwrap_or(0));
    }
    let mut over_cap = 0;
    let mut checked: HashSet<&Vec<usize>> = HashSet::new();
    for c in &cover.clusters {
        if !checked.insert(&c.vertices) {
            continue;
        }
        let radius = c
            .vertices
            .iter()
            .map(|&v| if v == c.center { 0 } else { g.neighborhood_symmetric_difference(c.center, v).len() })
            .max()
            .unwrap_or(0);
        if (2 * radius) as f64 > s.diff_cap && max_pairwise_difference(g, &c.vertices) as f64 > s.diff_cap {
            over_cap += 1;
        }
    }
    CoverReport {
        precondition,
        covered: runs_covering > 0,
        cover_rate: runs_covering as f64 / s.boost as f64,
        iterations_per_run: s.iterations(),
        max_multiplicity: max_mult,
        disjoint_within_iteration: disjoint,
        over_cap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edgeless_graph_gives_singletons() {
        let g = Graph::new(6);
        let cover = com_nei_clustering(&g, 1, &ClusterConfig { boost: Some(3), ..Default::default() }, 1).unwrap();
        assert!(cover.clusters.iter().all(|c| c.vertices.len() == 1));
        let report = check_cover_properties(&g, &cover, &[0]);
        assert!(report.precondition && report.covered);
    }

    #[test]
    fn two_cliques_with_bridge() {
        let mut edges = Vec::new();
        for base in [0, 5] {
            for a in 0..5 {
                for b in a + 1..5 {
                    edges.push((base + a, base + b));
                }
            }
        }
        edges.push((4, 5));
        let g = Graph::from_edges(10, edges).unwrap();
        let cover = com_nei_clustering(&g, 1, &ClusterConfig::default(), 3).unwrap();
        assert!(cover.covers(&[0, 1, 2, 3, 4]));
        assert!(cover.covers(&[5, 6, 7, 8, 9]));
        let report = check_cover_properties(&g, &cover, &[0, 1, 2, 3, 4]);
        assert!(report.disjoint_within_iteration);
        assert!(report.max_multiplicity <= report.iterations_per_run);
        assert_eq!(report.over_cap, 0);
    }

    #[test]
    fn rejects_bad_ell() {
        let g = Graph::new(4);
        assert!(com_nei_clustering(&g, 0, &ClusterConfig::default(), 0).is_err());
        assert!(com_nei_clustering(&g, 4, &ClusterConfig::default(), 0).is_err());
    }
}
