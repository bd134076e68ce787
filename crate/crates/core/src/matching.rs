//! Bipartite matching with capacities and `s`-`t` vertex connectivity
//! through the bipartite double-cover construction.

use std::collections::VecDeque;

use crate::error::{invalid, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capacity {
    Unit,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteInstance {
    pub left: usize,
    pub right: usize,
    pub edges: Vec<(usize, usize)>,
    pub left_cap: Vec<Capacity>,
    pub right_cap: Vec<Capacity>,
}

impl BipartiteInstance {
    pub fn unit(left: usize, right: usize, edges: Vec<(usize, usize)>) -> Self {
        BipartiteInstance {
            left,
            right,
            edges,
            left_cap: vec![Capacity::Unit; left],
            right_cap: vec![Capacity::Unit; right],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingResult {
    pub pairs: Vec<(usize, usize)>,
    pub cover_left: Vec<usize>,
    pub cover_right: Vec<usize>,
}

impl MatchingResult {
    pub fn size(&self) -> usize {
        self.pairs.len()
    }
}

/// Result of an `s`-`t` or `A`-`B` vertex connectivity query. `separator` is
/// `None` when the sides are adjacent and `kappa` is then `n - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StCut {
    pub kappa: usize,
    pub separator: Option<Vec<usize>>,
}

/// Max flow on `source -> left (cap) -> right (cap) -> sink` with uncapacitated
/// middle edges. Vertex capacities stand in for copies of each vertex.
struct CapacitatedEngine {
    to: Vec<usize>,
    cap: Vec<u64>,
    /// Arcs leaving node `x` are `adj[start[x]..start[x + 1]]`.
    start: Vec<usize>,
    adj: Vec<usize>,
    level: Vec<i32>,
    iter: Vec<usize>,
    left: usize,
}

const BIG: u64 = u64::MAX / 4;

impl CapacitatedEngine {
    fn new(left_cap: &[u64], right_cap: &[u64], edges: impl Iterator<Item = (usize, usize)>) -> Self {
        let left = left_cap.len();
        let nodes = left + right_cap.len() + 2;
        let (s, t) = (nodes - 2, nodes - 1);
        let mut arcs: Vec<(usize, usize, u64)> = Vec::with_capacity(4 * nodes);
        arcs.extend(left_cap.iter().enumerate().map(|(l, &c)| (s, l, c)));
        arcs.extend(right_cap.iter().enumerate().map(|(r, &c)| (left + r, t, c)));
        arcs.extend(edges.map(|(l, r)| (l, left + r, BIG)));
        let mut start = vec![0usize; nodes + 1];
        for &(a, b, _) in &arcs {
            start[a + 1] += 1;
            start[b + 1] += 1;
        }
        for x in 0..nodes {
            start[x + 1] += start[x];
        }
        let mut fill = start.clone();
        let mut adj = vec![0; 2 * arcs.len()];
        let mut to = Vec::with_capacity(2 * arcs.len());
        let mut cap = Vec::with_capacity(2 * arcs.len());
        for (a, b, c) in arcs {
            adj[fill[a]] = to.len();
            fill[a] += 1;
            to.push(b);
            cap.push(c);
            adj[fill[b]] = to.len();
            fill[b] += 1;
            to.push(a);
            cap.push(0);
        }
        CapacitatedEngine { to, cap, start, adj, level: vec![0; nodes], iter: vec![0; nodes], left }
    }

    fn nodes(&self) -> usize {
        self.start.len() - 1
    }

    fn source(&self) -> usize {
        self.nodes() - 2
    }

    fn sink(&self) -> usize {
        self.nodes() - 1
    }

    fn arcs(&self, x: usize) -> &[usize] {
        &self.adj[self.start[x]..self.start[x + 1]]
    }

    /// Route one unit along `source -> l -> r -> sink`. Any maximum flow
    /// leaves the same residual-reachable set, so seeding the obvious paths
    /// changes the running time and nothing else.
    fn seed_path(&mut self, l: usize, r: usize) -> bool {
        let right = self.left + r;
        let Some(&mid) = self.arcs(l).iter().find(|&&e| e % 2 == 0 && self.to[e] == right) else {
            return false;
        };
        // Source arcs were added first, then sink arcs, one pair each.
        let (s_arc, t_arc) = (2 * l, 2 * right);
        if self.cap[s_arc] == 0 || self.cap[t_arc] == 0 {
            return false;
        }
        for e in [s_arc, mid, t_arc] {
            self.cap[e] -= 1;
            self.cap[e ^ 1] += 1;
        }
        true
    }

    fn bfs(&mut self) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        let s = self.source();
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for i in self.start[x]..self.start[x + 1] {
                let e = self.adj[i];
                let y = self.to[e];
                if self.cap[e] > 0 && self.level[y] < 0 {
                    self.level[y] = self.level[x] + 1;
                    q.push_back(y);
                }
            }
        }
        self.level[self.sink()] >= 0
    }

    fn dfs(&mut self, x: usize, pushed: u64) -> u64 {
        if x == self.sink() {
            return pushed;
        }
        while self.iter[x] < self.start[x + 1] {
            let e = self.adj[self.iter[x]];
            let y = self.to[e];
            if self.cap[e] > 0 && self.level[y] == self.level[x] + 1 {
                let d = self.dfs(y, pushed.min(self.cap[e]));
                if d > 0 {
                    self.cap[e] -= d;
                    self.cap[e ^ 1] += d;
                    return d;
                }
            }
            self.iter[x] += 1;
        }
        0
    }

    fn run(&mut self) -> u64 {
        let mut flow = 0;
        while self.bfs() {
            let nodes = self.nodes();
            self.iter.copy_from_slice(&self.start[..nodes]);
            loop {
                let f = self.dfs(self.source(), BIG);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }

    /// König cover from residual reachability: unreachable left, reachable right.
    fn cover(&self) -> (Vec<bool>, Vec<bool>) {
        let mut seen = vec![false; self.nodes()];
        let s = self.source();
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &e in self.arcs(x) {
                let y = self.to[e];
                if self.cap[e] > 0 && !seen[y] {
                    seen[y] = true;
                    q.push_back(y);
                }
            }
        }
        let right = self.nodes() - 2 - self.left;
        let cl = (0..self.left).map(|l| !seen[l]).collect();
        let cr = (0..right).map(|r| seen[self.left + r]).collect();
        (cl, cr)
    }

    /// Middle edges carrying flow, as `(left, right)` pairs.
    fn matched(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for l in 0..self.left {
            for &e in self.arcs(l) {
                let y = self.to[e];
                if e % 2 == 0 && y >= self.left && y < self.nodes() - 2 && self.cap[e ^ 1] > 0 {
                    out.push((l, y - self.left));
                }
            }
        }
        out
    }
}

/// Maximum matching with a minimum vertex cover (König) for unit capacities.
/// Unbounded vertices must be expanded by the caller.
pub fn max_bipartite_matching(inst: &BipartiteInstance) -> Result<MatchingResult> {
    if inst.left_cap.len() != inst.left || inst.right_cap.len() != inst.right {
        return invalid("capacity vectors do not match side sizes");
    }
    if inst.left_cap.iter().chain(&inst.right_cap).any(|&c| c != Capacity::Unit) {
        return invalid("unbounded vertices must be expanded before matching");
    }
    if inst.edges.iter().any(|&(l, r)| l >= inst.left || r >= inst.right) {
        return invalid("edge endpoint out of range");
    }
    let mut engine =
        CapacitatedEngine::new(&vec![1; inst.left], &vec![1; inst.right], inst.edges.iter().copied());
    engine.run();
    let (cl, cr) = engine.cover();
    let mut pairs = engine.matched();
    pairs.sort_unstable();
    Ok(MatchingResult {
        pairs,
        cover_left: (0..inst.left).filter(|&l| cl[l]).collect(),
        cover_right: (0..inst.right).filter(|&r| cr[r]).collect(),
    })
}

/// `κ(s, t)`; adjacent pairs return `n - 1` with no separator.
pub fn st_vertex_connectivity(g: &Graph, s: usize, t: usize) -> Result<StCut> {
    if s >= g.n() || t >= g.n() || s == t {
        return invalid("need two distinct in-range vertices");
    }
    set_vertex_connectivity(g, &[s], &[t])
}

/// Minimum `A`-`B` vertex separator (disjoint from `A ∪ B`). If some edge
/// joins `A` and `B`, no separator exists and `kappa = n - 1`.
pub fn set_vertex_connectivity(g: &Graph, a: &[usize], b: &[usize]) -> Result<StCut> {
    let n = g.n();
    if a.is_empty() || b.is_empty() {
        return invalid("both terminal sets must be nonempty");
    }
    let mut side = vec![0u8; n];
    for &v in a {
        if v >= n {
            return invalid("terminal out of range");
        }
        side[v] = 1;
    }
    for &v in b {
        if v >= n {
            return invalid("terminal out of range");
        }
        if side[v] == 1 {
            return invalid("terminal sets must be disjoint");
        }
        side[v] = 2;
    }
    if a.iter().any(|&u| g.neighbors(u).iter().any(|&v| side[v] == 2)) {
        return Ok(StCut { kappa: n - 1, separator: None });
    }
    // Left: copies of V \ A; right: copies of V \ B.
    let mut left_id = vec![usize::MAX; n];
    let mut right_id = vec![usize::MAX; n];
    let mut left_of = Vec::new();
    let mut right_of = Vec::new();
    for v in 0..n {
        if side[v] != 1 {
            left_id[v] = left_of.len();
            left_of.push(v);
        }
        if side[v] != 2 {
            right_id[v] = right_of.len();
            right_of.push(v);
        }
    }
    let inf = n as u64;
    let left_cap: Vec<u64> = left_of.iter().map(|&v| if side[v] == 2 { inf } else { 1 }).collect();
    let right_cap: Vec<u64> = right_of.iter().map(|&v| if side[v] == 1 { inf } else { 1 }).collect();
    let edges = left_of.iter().enumerate().flat_map(|(l, &u)| {
        let right_id = &right_id;
        std::iter::once(u)
            .chain(g.neighbors(u).iter().copied())
            .filter(move |&v| right_id[v] != usize::MAX)
            .map(move |v| (l, right_id[v]))
    });
    let mut engine = CapacitatedEngine::new(&left_cap, &right_cap, edges);
    // Every free vertex matches its own copy; only the separator is left to find.
    let mut seeded = 0;
    for v in 0..n {
        if side[v] == 0 && engine.seed_path(left_id[v], right_id[v]) {
            seeded += 1;
        }
    }
    let value = seeded + engine.run() as usize;
    let (cl, cr) = engine.cover();
    let mut in_w = vec![false; n];
    let mut in_u = vec![false; n];
    for (l, &v) in left_of.iter().enumerate() {
        in_w[v] = cl[l];
    }
    for (r, &v) in right_of.iter().enumerate() {
        in_u[v] = cr[r];
    }
    let sep: Vec<usize> = (0..n)
        .filter(|&v| (in_u[v] && side[v] == 1) || (in_u[v] && in_w[v]) || (in_w[v] && side[v] == 2))
        .collect();
    let free = side.iter().filter(|&&s| s == 0).count();
    debug_assert_eq!(sep.len() + free, value);
    Ok(StCut { kappa: sep.len(), separator: Some(sep) })
}

/// Default number of rounds for [`repeat_matching_reduce`] on `n` vertices.
pub fn default_reduce_rounds(n: usize) -> usize {
    (3.0 * (n.max(2) as f64).log2()).ceil() as usize + 1
}

/// Repeatedly take a greedy maximal matching between `A` and `B \ D` (in id
/// order) and add its `B` endpoints to `D`. Stops after `rounds` rounds or
/// when a round matches nothing. Edges are those of `g` between `A` and `B`.
pub fn repeat_matching_reduce(g: &Graph, a: &[usize], b: &[usize], rounds: usize) -> Result<Vec<usize>> {
    if a.len() > b.len() {
        return invalid("repeat_matching_reduce needs |A| <= |B|");
    }
    let n = g.n();
    let mut in_b = vec![false; n];
    for &v in b {
        in_b[v] = true;
    }
    let mut a_sorted = a.to_vec();
    a_sorted.sort_unstable();
    let mut in_d = vec![false; n];
    let mut d = Vec::new();
    for _ in 0..rounds {
        let mut taken = Vec::new();
        for &u in &a_sorted {
            if let Some(&v) = g.neighbors(u).iter().find(|&&v| in_b[v] && !in_d[v]) {
                in_d[v] = true;
                taken.push(v);
            }
        }
        if taken.is_empty() {
            break;
        }
        d.extend(taken);
    }
    d.sort_unstable();
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::flow_st_kappa;

    #[test]
    fn perfect_matching_on_k33() {
        let edges = (0..3).flat_map(|l| (0..3).map(move |r| (l, r))).collect();
        let res = max_bipartite_matching(&BipartiteInstance::unit(3, 3, edges)).unwrap();
        assert_eq!(res.size(), 3);
        assert_eq!(res.cover_left.len() + res.cover_right.len(), 3);
    }

    #[test]
    fn star_cover_is_center() {
        let res = max_bipartite_matching(&BipartiteInstance::unit(1, 4, (0..4).map(|r| (0, r)).collect())).unwrap();
        assert_eq!(res.size(), 1);
        assert_eq!((res.cover_left.clone(), res.cover_right.clone()), (vec![0], vec![]));
    }

    #[test]
    fn unbounded_rejected() {
        let mut inst = BipartiteInstance::unit(1, 1, vec![(0, 0)]);
        inst.left_cap[0] = Capacity::Unbounded;
        assert!(max_bipartite_matching(&inst).is_err());
    }

    #[test]
    fn four_cycle_opposite_corners() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let cut = st_vertex_connectivity(&g, 0, 2).unwrap();
        assert_eq!(cut.kappa, 2);
        assert_eq!(cut.separator, Some(vec![1, 3]));
        assert_eq!(st_vertex_connectivity(&g, 0, 1).unwrap(), StCut { kappa: 3, separator: None });
    }

    #[test]
    fn petersen_pairs_match_flow() {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let g = Graph::from_edges(10, outer.chain(spokes).chain(inner)).unwrap();
        for s in 0..10 {
            for t in 0..10 {
                if s != t && !g.has_edge(s, t) {
                    assert_eq!(st_vertex_connectivity(&g, s, t).unwrap().kappa, 3);
                    assert_eq!(flow_st_kappa(&g, s, t).unwrap().kappa, 3);
                }
            }
        }
    }

    #[test]
    fn reduce_requires_smaller_side() {
        let g = Graph::from_edges(3, [(0, 1), (0, 2)]).unwrap();
        assert!(repeat_matching_reduce(&g, &[1, 2], &[0], 3).is_err());
        assert_eq!(repeat_matching_reduce(&g, &[0], &[1, 2], 1).unwrap(), vec![1]);
        assert_eq!(repeat_matching_reduce(&g, &[0], &[1, 2], 5).unwrap(), vec![1, 2]);
    }
}
