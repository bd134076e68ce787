//! Isolating cuts: for an independent terminal set `T` inside a vertex set
//! `C`, the minimum separator between each `v ∈ T` and `T \ {v}` whose
//! `v`-side stays inside `C`, using `O(log |T|)` set-to-set cuts plus one
//! small cut per terminal.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::graph::{Graph, GraphBuilder};
use crate::matching::{default_reduce_rounds, repeat_matching_reduce, set_vertex_connectivity, st_vertex_connectivity};

/// A graph built around part of a host graph. `to_orig[i]` is the host id
/// of local vertex `i`, or `usize::MAX` for added vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalGraph {
    pub graph: Graph,
    pub to_orig: Vec<usize>,
    pub source: usize,
    pub sink: usize,
}

impl LocalGraph {
    pub fn orig(&self, local: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = local.iter().map(|&v| self.to_orig[v]).filter(|&v| v != usize::MAX).collect();
        out.sort_unstable();
        out
    }
}

fn check_component(g: &Graph, u_s: &[usize], s: usize) -> Result<Vec<usize>> {
    let mut u = u_s.to_vec();
    u.sort_unstable();
    u.dedup();
    if u.iter().any(|&v| v >= g.n()) {
        return invalid("component vertex out of range");
    }
    if u.binary_search(&s).is_err() {
        return invalid("component must contain its terminal");
    }
    if !g.is_connected_set(&u) {
        return invalid("component must induce a connected subgraph");
    }
    Ok(u)
}

/// `G'_s`: `G[N[U_s]]` without edges inside `N(U_s)`, plus a sink joined to `N(U_s)`.
pub fn terminal_component_graph(g: &Graph, u_s: &[usize], s: usize) -> Result<LocalGraph> {
    let u = check_component(g, u_s, s)?;
    let boundary = g.neighborhood(&u);
    Ok(build_component(g, &u, &boundary, &boundary, s))
}

/// Local graph on `U ∪ keep ∪ {t}` with every edge leaving `U` toward kept
/// vertices and `t` joined to `attach`.
fn build_component(g: &Graph, u: &[usize], keep: &[usize], attach: &[usize], s: usize) -> LocalGraph {
    let mut local = vec![usize::MAX; g.n()];
    let mut to_orig = Vec::with_capacity(u.len() + keep.len() + 1);
    for &v in u.iter().chain(keep) {
        local[v] = to_orig.len();
        to_orig.push(v);
    }
    let mut b = GraphBuilder::new(to_orig.len());
    for &v in u {
        for &w in g.neighbors(v) {
            let lw = local[w];
            if lw != usize::MAX {
                b.add_edge(local[v], lw);
            }
        }
    }
    let sink = b.add_vertex();
    to_orig.push(usize::MAX);
    for v in attach {
        b.add_edge(local[*v], sink);
    }
    LocalGraph { graph: b.build(), to_orig, source: local[s], sink }
}

/// Output of [`sparsify_component`]: `κ_{G'_s}(s, t) = κ_{reduced}(s, t) + |Z|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sparsified {
    pub reduced: LocalGraph,
    /// Common neighbors of `s` and the sink, removed and added back.
    pub z: Vec<usize>,
    /// Boundary vertices kept next to the sink.
    pub d: Vec<usize>,
}

/// Shrink `G'_s`: drop `Z = N(s) ∩ N(U_s)`; when `|U_s| ≤ |N(U_s) \ Z|`, keep only
/// the boundary vertices collected by repeated greedy matchings.
pub fn sparsify_component(g: &Graph, u_s: &[usize], s: usize, rounds: Option<usize>) -> Result<Sparsified> {
    let u = check_component(g, u_s, s)?;
    let boundary = g.neighborhood(&u);
    let ns = g.neighbors(s);
    let (z, b): (Vec<usize>, Vec<usize>) = boundary.iter().partition(|&&v| ns.binary_search(&v).is_ok());
    let d = if u.len() <= b.len() {
        let rounds = rounds.unwrap_or_else(|| default_reduce_rounds(u.len() + b.len()));
        repeat_matching_reduce(g, &u, &b, rounds)?
    } else {
        b
    };
    let reduced = build_component(g, &u, &d, &d, s);
    Ok(Sparsified { reduced, z, d })
}

/// `G'_s` with the sink replaced by one pendant per boundary vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YGraph {
    pub graph: Graph,
    pub to_orig: Vec<usize>,
    pub source: usize,
    pub pendants: Vec<usize>,
}

pub fn cut_equivalent_y(local: &LocalGraph) -> YGraph {
    let g = &local.graph;
    let keep: Vec<usize> = (0..g.n()).filter(|&v| v != local.sink).collect();
    let mut pos = vec![usize::MAX; g.n()];
    for (i, &v) in keep.iter().enumerate() {
        pos[v] = i;
    }
    let mut b = GraphBuilder::new(keep.len());
    for (u, v) in g.edges() {
        if u != local.sink && v != local.sink {
            b.add_edge(pos[u], pos[v]);
        }
    }
    let mut to_orig: Vec<usize> = keep.iter().map(|&v| local.to_orig[v]).collect();
    let mut pendants = Vec::new();
    for &x in g.neighbors(local.sink) {
        let y = b.add_vertex();
        b.add_edge(pos[x], y);
        to_orig.push(usize::MAX);
        pendants.push(y);
    }
    YGraph { graph: b.build(), to_orig, source: pos[local.source], pendants }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TerminalCut {
    pub terminal: usize,
    /// The terminal's side, contained in `C`.
    pub left: Vec<usize>,
    /// `N(left)`, the minimum isolating separator.
    pub separator: Vec<usize>,
}

impl TerminalCut {
    pub fn size(&self) -> usize {
        self.separator.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsolatingResult {
    pub per_terminal: Vec<TerminalCut>,
    /// Index into `per_terminal` of the smallest separator.
    pub best: usize,
    /// `|V(G''_s)|` for each terminal, in `per_terminal` order.
    pub reduced_sizes: Vec<usize>,
    pub set_cuts: usize,
}

impl IsolatingResult {
    pub fn best_cut(&self) -> &TerminalCut {
        &self.per_terminal[self.best]
    }
}

/// For each `v ∈ T`: minimum `|N(L)|` over `L ⊆ C` with `L ∩ T = {v}` and
/// `N(L) ∩ T = ∅`. Only edges incident to `C` matter. Boundary vertices of
/// `C` get pendant terminals so that no side can leave `C`.
pub fn isolating_cuts(g: &Graph, c: &[usize], terminals: &[usize]) -> Result<IsolatingResult> {
    let n = g.n();
    let mut c = c.to_vec();
    c.sort_unstable();
    c.dedup();
    let mut t = terminals.to_vec();
    t.sort_unstable();
    t.dedup();
    if t.len() < 2 {
        return invalid("isolating cuts need at least two terminals");
    }
    if c.iter().any(|&v| v >= n) {
        return invalid("cluster vertex out of range");
    }
    if t.iter().any(|v| c.binary_search(v).is_err()) {
        return invalid("terminals must lie inside the cluster");
    }
    if t.iter().any(|&u| g.neighbors(u).iter().any(|v| t.binary_search(v).is_ok())) {
        return invalid("terminals must be independent");
    }

    // Working graph: C-incident edges on N[C], plus a pendant per boundary vertex.
    let boundary = g.neighborhood(&c);
    let mut to_orig: Vec<usize> = c.iter().chain(&boundary).copied().collect();
    let mut local = vec![usize::MAX; n];
    for (i, &v) in to_orig.iter().enumerate() {
        local[v] = i;
    }
    let mut b = GraphBuilder::new(to_orig.len());
    for &v in &c {
        for &w in g.neighbors(v) {
            b.add_edge(local[v], local[w]);
        }
    }
    let mut all_terms: Vec<usize> = t.iter().map(|&v| local[v]).collect();
    for &x in &boundary {
        let y = b.add_vertex();
        b.add_edge(local[x], y);
        to_orig.push(usize::MAX);
        all_terms.push(y);
    }
    let w = b.build();

    let bits = (usize::BITS - (all_terms.len() - 1).leading_zeros()) as usize;
    let mut removed = vec![false; w.n()];
    for bit in 0..bits {
        let mut a_side = Vec::new();
        let mut b_side = Vec::new();
        for (k, &v) in all_terms.iter().enumerate() {
            if (k >> bit) & 1 == 1 {
                a_side.push(v);
            } else {
                b_side.push(v);
            }
        }
        let cut = set_vertex_connectivity(&w, &a_side, &b_side)?;
        let sep = cut.separator.expect("independent terminals always admit a separator");
        for v in sep {
            removed[v] = true;
        }
    }

    let mut per_terminal = Vec::with_capacity(t.len());
    let mut reduced_sizes = Vec::with_capacity(t.len());
    for (k, &s) in all_terms.iter().take(t.len()).enumerate() {
        let u_s = if removed[s] { vec![s] } else { w.component_avoiding(s, &removed) };
        let sp = sparsify_component(&w, &u_s, s, None)?;
        let red = &sp.reduced;
        let cut = st_vertex_connectivity(&red.graph, red.source, red.sink)?;
        let sep_local = cut.separator.expect("source is not adjacent to the sink after sparsification");
        let mut sep_w: Vec<usize> = sep_local.iter().map(|&v| red.to_orig[v]).collect();
        sep_w.extend_from_slice(&sp.z);
        let mut blocked = vec![false; w.n()];
        for &v in &sep_w {
            blocked[v] = true;
        }
        let left_w = w.component_avoiding(s, &blocked);
        let left: Vec<usize> = {
            let mut l: Vec<usize> = left_w.iter().map(|&v| to_orig[v]).collect();
            l.sort_unstable();
            l
        };
        let separator = g.neighborhood(&left);
        debug_assert_eq!(separator.len(), sep_w.len());
        per_terminal.push(TerminalCut { terminal: t[k], left, separator });
        reduced_sizes.push(red.graph.n());
    }
    let best = (0..per_terminal.len())
        .min_by(|&a, &b| per_terminal[a].separator.len().cmp(&per_terminal[b].separator.len()).then(a.cmp(&b)))
        .expect("at least two terminals");
    Ok(IsolatingResult { per_terminal, best, reduced_sizes, set_cuts: bits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::flow_st_kappa;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn two_terminals_on_a_cycle() {
        let g = cycle(6);
        let res = isolating_cuts(&g, &(0..6).collect::<Vec<_>>(), &[0, 3]).unwrap();
        assert_eq!(res.per_terminal.iter().map(TerminalCut::size).collect::<Vec<_>>(), vec![2, 2]);
        for cut in &res.per_terminal {
            assert!(cut.left.contains(&cut.terminal));
            assert!(!cut.separator.contains(&0) && !cut.separator.contains(&3));
        }
    }

    #[test]
    fn rejects_adjacent_terminals() {
        let g = cycle(5);
        assert!(isolating_cuts(&g, &[0, 1, 2, 3, 4], &[0, 1]).is_err());
        assert!(isolating_cuts(&g, &[0, 1, 2, 3, 4], &[0]).is_err());
    }

    #[test]
    fn sides_stay_inside_the_cluster() {
        // Path 0-1-2-3-4 with C = {0, 1, 2}: terminal 0 is isolated by {1}.
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let res = isolating_cuts(&g, &[0, 1, 2], &[0, 2]).unwrap();
        let cut2 = &res.per_terminal[1];
        assert_eq!(cut2.left, vec![2]);
        assert_eq!(cut2.separator, vec![1, 3]);
    }

    #[test]
    fn sparsification_preserves_connectivity_on_grid() {
        let mut edges = Vec::new();
        for r in 0..3 {
            for c in 0..3 {
                let v = r * 3 + c;
                if c < 2 {
                    edges.push((v, v + 1));
                }
                if r < 2 {
                    edges.push((v, v + 3));
                }
            }
        }
        let g = Graph::from_edges(9, edges).unwrap();
        let u = vec![0, 1, 3, 4];
        let full = terminal_component_graph(&g, &u, 0).unwrap();
        let sp = sparsify_component(&g, &u, 0, None).unwrap();
        let k_full = flow_st_kappa(&full.graph, full.source, full.sink).unwrap().kappa;
        let k_red = flow_st_kappa(&sp.reduced.graph, sp.reduced.source, sp.reduced.sink).unwrap().kappa;
        assert_eq!(k_full, k_red + sp.z.len());
    }
}
