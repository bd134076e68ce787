//! Minimum neighborhood cut inside a cluster: `min |N(L)|` over nonempty
//! `L ⊆ C`, by sampling sources, sparsifying the boundary of `C` once for all
//! sources, and solving one small `s`-`t` cut per source.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{Graph, GraphBuilder};
use crate::isolating::LocalGraph;
use crate::matching::{default_reduce_rounds, st_vertex_connectivity};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinNnccConfig {
    /// Sources sampled: `⌈sample_mult · |C| · log n / ℓ⌉`, capped at `|C|`.
    pub sample_mult: f64,
    /// Matching rounds for boundary sparsification (default `⌈3 log n⌉`).
    pub rounds: Option<usize>,
}

impl Default for MinNnccConfig {
    fn default() -> Self {
        MinNnccConfig { sample_mult: 4.0, rounds: None }
    }
}

/// Sparsified boundary `C' ⊆ N(C)` and the offset `K` of common neighbors of
/// all sampled sources.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundarySparsification {
    pub c_prime: Vec<usize>,
    pub k: usize,
    pub k_set: Vec<usize>,
    pub rounds_used: usize,
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// For every `x ∈ X`: `min_{x ∈ L ⊆ C} |N_G(L)| = min_{x ∈ L ⊆ C} |N_{G[C ∪ C']}(L)| + K`.
pub fn batched_boundary_sparsify(
    g: &Graph,
    c: &[usize],
    x: &[usize],
    rounds: Option<usize>,
) -> Result<BoundarySparsification> {
    let n = g.n();
    let c = sorted(c);
    let x = sorted(x);
    if c.is_empty() || c.iter().any(|&v| v >= n) {
        return invalid("cluster must be a nonempty set of vertices");
    }
    if x.iter().any(|v| c.binary_search(v).is_err()) {
        return invalid("sources must lie inside the cluster");
    }
    if x.is_empty() {
        return Ok(BoundarySparsification { c_prime: Vec::new(), k: 0, k_set: Vec::new(), rounds_used: 0 });
    }
    let boundary = g.neighborhood(&c);
    let mut in_boundary = vec![false; n];
    for &b in &boundary {
        in_boundary[b] = true;
    }
    // Boundary vertices adjacent to every source.
    let mut hits = vec![0usize; n];
    for &s in &x {
        for &w in g.neighbors(s) {
            if in_boundary[w] {
                hits[w] += 1;
            }
        }
    }
    let k_set: Vec<usize> = boundary.iter().copied().filter(|&b| hits[b] == x.len()).collect();
    let mut in_tilde = vec![false; n];
    for &b in &boundary {
        in_tilde[b] = hits[b] > 0 && hits[b] < x.len();
    }
    let excluded = |b: usize, in_tilde: &[bool]| in_tilde[b] || hits[b] == x.len();
    let rounds = rounds.unwrap_or_else(|| default_reduce_rounds(n) - 1).max(1);
    let mut rounds_used = 0;
    for _ in 0..rounds {
        let mut taken = Vec::new();
        for &u in &c {
            if let Some(&b) = g.neighbors(u).iter().find(|&&b| in_boundary[b] && !excluded(b, &in_tilde)) {
                in_tilde[b] = true;
                taken.push(b);
            }
        }
        rounds_used += 1;
        if taken.is_empty() {
            break;
        }
    }
    let c_prime = boundary.iter().copied().filter(|&b| in_tilde[b]).collect();
    Ok(BoundarySparsification { c_prime, k: k_set.len(), k_set, rounds_used })
}

/// `H_x` on `C ⊔ C'_x ⊔ {t}` with its offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceInstance {
    pub local: LocalGraph,
    /// `Z_x = N(x) ∩ C'`, always on the separator.
    pub z: Vec<usize>,
    pub k: usize,
}

impl SourceInstance {
    /// `κ_{H_x}(x, t) + |Z_x| + K`.
    pub fn objective(&self) -> Result<usize> {
        let cut = st_vertex_connectivity(&self.local.graph, self.local.source, self.local.sink)?;
        Ok(cut.kappa + self.z.len() + self.k)
    }
}

/// Build `H_x`: edges of `G` incident to `C` except those inside `N(x) ∩ C`,
/// toward `C ∪ C'_x`, plus a sink joined to `C'_x = C' \ N(x)`.
pub fn construct_source_instance(g: &Graph, c: &[usize], sp: &BoundarySparsification, x: usize) -> Result<SourceInstance> {
    let c = sorted(c);
    if c.binary_search(&x).is_err() {
        return invalid("source must lie inside the cluster");
    }
    let nx = g.neighbors(x);
    let (z, cx): (Vec<usize>, Vec<usize>) = sp.c_prime.iter().partition(|&&b| nx.binary_search(&b).is_ok());
    let mut local = vec![usize::MAX; g.n()];
    let mut to_orig = Vec::with_capacity(c.len() + cx.len() + 1);
    for &v in c.iter().chain(&cx) {
        local[v] = to_orig.len();
        to_orig.push(v);
    }
    let near_x = |v: usize| nx.binary_search(&v).is_ok() && c.binary_search(&v).is_ok();
    let mut b = GraphBuilder::new(to_orig.len());
    for &v in &c {
        for &w in g.neighbors(v) {
            let lw = local[w];
            if lw != usize::MAX
                && !(near_x(v) && near_x(w)) {
                    b.add_edge(local[v], lw);
                }
        }
    }
    let sink = b.add_vertex();
    to_orig.push(usize::MAX);
    for v in &cx {
        b.add_edge(local[*v], sink);
    }
    Ok(SourceInstance {
        local: LocalGraph { graph: b.build(), to_orig, source: local[x], sink },
        z,
        k: sp.k,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NnccResult {
    pub left: Vec<usize>,
    /// `|N_G(left)|`, measured directly.
    pub size: usize,
    /// Best `κ_{H_x}(x, t) + |Z_x| + K` over sampled sources.
    pub objective: usize,
    pub source: usize,
    pub sampled: Vec<usize>,
    pub boundary: BoundarySparsification,
}

pub fn sample_count(c_len: usize, n: usize, ell: usize, cfg: &MinNnccConfig) -> usize {
    let log = (n.max(2) as f64).log2();
    let want = (cfg.sample_mult * c_len as f64 * log / ell.max(1) as f64).ceil() as usize;
    want.clamp(1, c_len)
}

/// Approximately `min |N_G(L)|` over nonempty `L ⊆ C`; exact whenever a
/// sampled source lies in a minimizer. The returned side is always a
/// nonempty subset of `C` and `size` is its true neighborhood size.
pub fn min_nncc(g: &Graph, c: &[usize], ell: usize, cfg: &MinNnccConfig, seed: u64) -> Result<NnccResult> {
    Ok(min_nncc_below(g, c, ell, cfg, seed, usize::MAX)?.expect("unbounded search always answers"))
}

/// [`min_nncc`] restricted to answers below `bound`. A sampled source `x`
/// is skipped when `|N(x) \ C| ≥ bound`, since every side through `x` has at
/// least that many neighbors; `None` means no source could go below `bound`.
/// The sample and the boundary sparsification do not depend on `bound`.
pub fn min_nncc_below(
    g: &Graph,
    c: &[usize],
    ell: usize,
    cfg: &MinNnccConfig,
    seed: u64,
    bound: usize,
) -> Result<Option<NnccResult>> {
    let c = sorted(c);
    if c.is_empty() || c.iter().any(|&v| v >= g.n()) {
        return invalid("cluster must be a nonempty set of vertices");
    }
    if g.closed_neighborhood(&c).len() == g.n() {
        return invalid("N[C] must not cover every vertex");
    }
    let mut pool = c.clone();
    pool.shuffle(&mut rng::rng(seed, &[0x22cc]));
    let mut sampled: Vec<usize> = pool[..sample_count(c.len(), g.n(), ell, cfg)].to_vec();
    sampled.sort_unstable();
    let sp = batched_boundary_sparsify(g, &c, &sampled, cfg.rounds)?;
    let mut best: Option<(usize, usize, SourceInstance)> = None;
    for &x in &sampled {
        let outside = g.neighbors(x).iter().filter(|v| c.binary_search(v).is_err()).count();
        if outside >= bound {
            continue;
        }
        let inst = construct_source_instance(g, &c, &sp, x)?;
        let obj = inst.objective()?;
        if best.as_ref().is_none_or(|(b, _, _)| obj < *b) {
            best = Some((obj, x, inst));
        }
    }
    let Some((objective, source, inst)) = best else {
        return Ok(None);
    };
    let h = &inst.local;
    let cut = st_vertex_connectivity(&h.graph, h.source, h.sink)?;
    let mut blocked = vec![false; h.graph.n()];
    for &v in cut.separator.as_deref().unwrap_or(&[]) {
        blocked[v] = true;
    }
    let left = h.orig(&h.graph.component_avoiding(h.source, &blocked));
    let size = g.neighborhood(&left).len();
    Ok(Some(NnccResult { left, size, objective, source, sampled, boundary: sp }))
}
