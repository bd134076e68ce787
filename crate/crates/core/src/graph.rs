//! Undirected simple graphs, vertex cuts, and the edge-list format.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Simple undirected graph on vertices `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], m: 0 }
    }

    /// Build from an edge list. Duplicate edges collapse; self-loops and
    /// out-of-range endpoints are errors (reported with line 0).
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop { line: 0, v: u });
            }
            for w in [u, v] {
                if w >= n {
                    return Err(Error::Range { line: 0, id: w, n });
                }
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Ok(Self::from_adjacency(adj))
    }

    fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Self {
        let mut deg_sum = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            deg_sum += list.len();
        }
        Graph { adj, m: deg_sum / 2 }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// `(vertex, degree)` of the smallest-id vertex of minimum degree.
    pub fn min_degree(&self) -> Option<(usize, usize)> {
        (0..self.n()).map(|v| (v, self.degree(v))).min_by_key(|&(v, d)| (d, v))
    }

    /// Open neighborhood `N(L) = (∪_{v∈L} N(v)) \ L`, sorted.
    pub fn neighborhood(&self, set: &[usize]) -> Vec<usize> {
        let mut mark = vec![0u8; self.n()];
        for &v in set {
            mark[v] = 1;
        }
        let mut out = Vec::new();
        for &v in set {
            for &u in &self.adj[v] {
                if mark[u] == 0 {
                    mark[u] = 2;
                    out.push(u);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Closed neighborhood `N[L] = L ∪ N(L)`, sorted.
    pub fn closed_neighborhood(&self, set: &[usize]) -> Vec<usize> {
        let mut out = self.neighborhood(set);
        out.extend_from_slice(set);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `N(u) △ N(v)`, sorted.
    pub fn neighborhood_symmetric_difference(&self, u: usize, v: usize) -> Vec<usize> {
        let (a, b) = (&self.adj[u], &self.adj[v]);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if x == y => {
                    i += 1;
                    j += 1;
                }
                (Some(&x), Some(&y)) if x < y => {
                    out.push(x);
                    i += 1;
                }
                (Some(&x), None) => {
                    out.push(x);
                    i += 1;
                }
                (_, Some(&y)) => {
                    out.push(y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        out
    }

    /// Vertices reachable from `s` avoiding `blocked`, sorted. Empty if `s` is blocked.
    pub fn component_avoiding(&self, s: usize, blocked: &[bool]) -> Vec<usize> {
        if blocked[s] {
            return Vec::new();
        }
        let mut seen = vec![false; self.n()];
        seen[s] = true;
        let mut stack = vec![s];
        let mut out = vec![s];
        while let Some(v) = stack.pop() {
            for &u in &self.adj[v] {
                if !seen[u] && !blocked[u] {
                    seen[u] = true;
                    stack.push(u);
                    out.push(u);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut comps = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            let comp = self.component_avoiding(s, &seen);
            for &v in &comp {
                seen[v] = true;
            }
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.components().len() == 1
    }

    /// Whether `set` induces a connected subgraph (false for the empty set).
    pub fn is_connected_set(&self, set: &[usize]) -> bool {
        let Some(&s) = set.first() else {
            return false;
        };
        let mut blocked = vec![true; self.n()];
        for &v in set {
            blocked[v] = false;
        }
        self.component_avoiding(s, &blocked).len() == set.len()
    }

    /// Induced subgraph on `vertices`; local id `i` corresponds to `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let adj = vertices
            .iter()
            .map(|&v| self.adj[v].iter().filter(|&&u| local[u] != usize::MAX).map(|&u| local[u]).collect())
            .collect();
        Self::from_adjacency(adj)
    }
}

/// Incremental builder used by the local constructions.
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    adj: Vec<Vec<usize>>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        GraphBuilder { adj: vec![Vec::new(); n] }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Add edge `uv`; self-loops are ignored and duplicates collapse on build.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u].push(v);
            self.adj[v].push(u);
        }
    }

    pub fn build(self) -> Graph {
        Graph::from_adjacency(self.adj)
    }
}

/// Parse the edge-list format: optional `p <n> <m>` header, then `u v` lines.
/// Blank lines and lines starting with `#` or `c` are skipped.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut max_id: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('c') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens[0] == "p" {
            if declared.is_some() || !edges.is_empty() {
                return Err(Error::Format { line, msg: "header must precede all edges".into() });
            }
            if tokens.len() != 3 {
                return Err(Error::Format { line, msg: "expected `p <n> <m>`".into() });
            }
            declared = Some(parse_id(tokens[1], line)?);
            parse_id(tokens[2], line)?;
            continue;
        }
        if tokens.len() != 2 {
            return Err(Error::Format { line, msg: format!("expected `u v`, found {} tokens", tokens.len()) });
        }
        let u = parse_id(tokens[0], line)?;
        let v = parse_id(tokens[1], line)?;
        if u == v {
            return Err(Error::SelfLoop { line, v: u });
        }
        if let Some(n) = declared {
            for id in [u, v] {
                if id >= n {
                    return Err(Error::Range { line, id, n });
                }
            }
        }
        max_id = Some(max_id.map_or(u.max(v), |m: usize| m.max(u).max(v)));
        edges.push((u, v));
    }
    let n = declared.unwrap_or_else(|| max_id.map_or(0, |m| m + 1));
    Graph::from_edges(n, edges)
}

fn parse_id(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| Error::Format { line, msg: format!("`{tok}` is not a vertex id") })
}

/// Inverse of [`parse_edge_list`]: a `p n m` header, then one edge per line.
pub fn to_edge_list(g: &Graph) -> String {
    let mut out = format!("p {} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Erdős–Rényi `G(n, p)` from a seeded stream.
pub fn random_gnp(n: usize, p: f64, seed: u64) -> Graph {
    use rand::Rng as _;
    let mut r = crate::rng::rng(seed, &[0x6e9]);
    let p = p.clamp(0.0, 1.0);
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p) {
                b.add_edge(u, v);
            }
        }
    }
    b.build()
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_edge_list(&text)
}

/// `|N(u) △ N(v)|` for distinct `u`, `v`.
pub fn neighborhood_difference(g: &Graph, u: usize, v: usize) -> Result<usize> {
    if u == v {
        return invalid("neighborhood difference needs two distinct vertices");
    }
    if u >= g.n() || v >= g.n() {
        return invalid("vertex out of range");
    }
    Ok(g.neighborhood_symmetric_difference(u, v).len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CutKind {
    Proper,
    Degenerate,
}

/// A vertex cut `(L, S, R)`. Proper cuts have `L`, `R` nonempty and no
/// `L`–`R` edge; the degenerate cut has `|S| = n - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexCut {
    pub kind: CutKind,
    #[serde(rename = "L")]
    pub left: Vec<usize>,
    #[serde(rename = "S")]
    pub separator: Vec<usize>,
    #[serde(rename = "R")]
    pub right: Vec<usize>,
    pub size: usize,
}

impl VertexCut {
    /// Degenerate cut `S = {1, ..., n-1}`, `R = {0}`.
    pub fn degenerate(n: usize) -> Self {
        Self::degenerate_for_sink(n, 0)
    }

    /// Degenerate cut keeping only `t` outside the separator.
    pub fn degenerate_for_sink(n: usize, t: usize) -> Self {
        let separator: Vec<usize> = (0..n).filter(|&v| v != t).collect();
        let right = if n > 0 { vec![t] } else { Vec::new() };
        VertexCut { kind: CutKind::Degenerate, size: separator.len(), left: Vec::new(), separator, right }
    }

    /// The cut `(L, N(L), V \ N[L])`.
    pub fn from_left(g: &Graph, left: &[usize]) -> Self {
        let mut left = left.to_vec();
        left.sort_unstable();
        left.dedup();
        let separator = g.neighborhood(&left);
        let mut side = vec![false; g.n()];
        for &v in left.iter().chain(&separator) {
            side[v] = true;
        }
        let right = (0..g.n()).filter(|&v| !side[v]).collect();
        VertexCut { kind: CutKind::Proper, size: separator.len(), left, separator, right }
    }

    /// Cut around `S`, with `L` the component of `anchor` in `G - S`.
    pub fn from_separator(g: &Graph, separator: &[usize], anchor: usize) -> Self {
        let mut blocked = vec![false; g.n()];
        for &v in separator {
            blocked[v] = true;
        }
        let left = g.component_avoiding(anchor, &blocked);
        let mut sep = separator.to_vec();
        sep.sort_unstable();
        sep.dedup();
        let mut side = blocked;
        for &v in &left {
            side[v] = true;
        }
        let right = (0..g.n()).filter(|&v| !side[v]).collect();
        VertexCut { kind: CutKind::Proper, size: sep.len(), left, separator: sep, right }
    }

    /// Ordering key: size first, then the separator lexicographically.
    pub fn key(&self) -> (usize, &[usize]) {
        (self.size, &self.separator)
    }

    /// Keep the better of two optional cuts under [`VertexCut::key`].
    pub fn better(a: Option<VertexCut>, b: VertexCut) -> Option<VertexCut> {
        match a {
            Some(a) if a.key() <= b.key() => Some(a),
            _ => Some(b),
        }
    }
}

/// Structural problems that make a triple not a partition of `V`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvalidCut {
    #[error("vertex {0} out of range")]
    OutOfRange(usize),
    #[error("vertex {0} appears more than once")]
    Overlap(usize),
    #[error("vertex {0} missing from L, S and R")]
    Missing(usize),
    #[error("size field {size} does not match |S| = {actual}")]
    SizeMismatch { size: usize, actual: usize },
}

/// Checks a cut against `g`. Structural errors are `Err`; a partition that
/// violates the cut conditions yields `Ok(false)`.
pub fn validate_cut(g: &Graph, cut: &VertexCut) -> std::result::Result<bool, InvalidCut> {
    let n = g.n();
    let mut side = vec![0u8; n];
    for (tag, part) in [(1u8, &cut.left), (2, &cut.separator), (3, &cut.right)] {
        for &v in part.iter() {
            if v >= n {
                return Err(InvalidCut::OutOfRange(v));
            }
            if side[v] != 0 {
                return Err(InvalidCut::Overlap(v));
            }
            side[v] = tag;
        }
    }
    if let Some(v) = side.iter().position(|&s| s == 0) {
        return Err(InvalidCut::Missing(v));
    }
    if cut.size != cut.separator.len() {
        return Err(InvalidCut::SizeMismatch { size: cut.size, actual: cut.separator.len() });
    }
    Ok(match cut.kind {
        CutKind::Degenerate => n >= 1 && cut.separator.len() == n - 1,
        CutKind::Proper => {
            !cut.left.is_empty()
                && !cut.right.is_empty()
                && cut.left.iter().all(|&v| g.neighbors(v).iter().all(|&u| side[u] != 3))
        }
    })
}

/// Sorted set difference `a \ b` of sorted slices.
pub fn set_minus(a: &[usize], b: &[usize]) -> Vec<usize> {
    let drop: BTreeSet<usize> = b.iter().copied().collect();
    a.iter().copied().filter(|v| !drop.contains(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn parse_collapses_duplicates() {
        let g = parse_edge_list("p 4 3\n0 1\n1 0\n2 3\n").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.m(), 2);
    }

    #[test]
    fn parse_reports_self_loop_line() {
        assert_eq!(parse_edge_list("0 1\n\n2 2\n"), Err(Error::SelfLoop { line: 3, v: 2 }));
    }

    #[test]
    fn parse_reports_range() {
        assert_eq!(parse_edge_list("p 3 1\n0 5\n"), Err(Error::Range { line: 2, id: 5, n: 3 }));
    }

    #[test]
    fn parse_without_header_infers_n() {
        let g = parse_edge_list("# comment\n0 4\n").unwrap();
        assert_eq!(g.n(), 5);
        assert!(matches!(parse_edge_list("0 x\n"), Err(Error::Format { line: 1, .. })));
        assert!(matches!(parse_edge_list("0 1 2\n"), Err(Error::Format { line: 1, .. })));
    }

    #[test]
    fn neighborhood_difference_examples() {
        let g = path3();
        assert_eq!(neighborhood_difference(&g, 0, 2).unwrap(), 0);
        assert_eq!(neighborhood_difference(&g, 0, 1).unwrap(), 3);
        assert!(neighborhood_difference(&g, 1, 1).is_err());
    }

    #[test]
    fn validate_cut_examples() {
        let g = path3();
        let good = VertexCut { kind: CutKind::Proper, left: vec![0], separator: vec![1], right: vec![2], size: 1 };
        assert_eq!(validate_cut(&g, &good), Ok(true));
        let crossing = VertexCut { kind: CutKind::Proper, left: vec![0], separator: vec![2], right: vec![1], size: 1 };
        assert_eq!(validate_cut(&g, &crossing), Ok(false));
        let overlap = VertexCut { kind: CutKind::Proper, left: vec![0, 1], separator: vec![1], right: vec![2], size: 1 };
        assert_eq!(validate_cut(&g, &overlap), Err(InvalidCut::Overlap(1)));
        let k3 = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(validate_cut(&k3, &VertexCut::degenerate(3)), Ok(true));
    }

    #[test]
    fn cut_constructors() {
        let g = path3();
        let c = VertexCut::from_left(&g, &[0]);
        assert_eq!((c.separator.clone(), c.right.clone()), (vec![1], vec![2]));
        let c = VertexCut::from_separator(&g, &[1], 2);
        assert_eq!(c.left, vec![2]);
        assert_eq!(validate_cut(&g, &c), Ok(true));
    }

    #[test]
    fn induced_and_components() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1, 2], vec![3, 4]]);
        assert!(!g.is_connected());
        let h = g.induced(&[1, 2, 3]);
        assert_eq!(h.m(), 1);
        assert!(g.is_connected_set(&[0, 1, 2]));
        assert!(!g.is_connected_set(&[0, 2]));
    }
}
