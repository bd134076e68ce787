//! Reference answers: exhaustive search for small graphs and max-flow
//! (Menger) computations. Everything else in the crate is tested against
//! these.

mod flow;

use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, VertexCut};

use flow::SplitNetwork;

/// Default cap on `n` for exhaustive vertex-cut search.
pub const BRUTE_FORCE_LIMIT: usize = 14;
/// Default cap on `|V'|` for exhaustive minimum-neighborhood search.
pub const MIN_NEIGHBOR_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleAnswer {
    pub kappa: usize,
    pub witness: VertexCut,
    /// Internally vertex-disjoint `s`–`t` paths, for flow answers on a non-adjacent pair.
    pub paths: Option<Vec<Vec<usize>>>,
}

fn masks(g: &Graph) -> Result<Vec<u128>> {
    if g.n() > 128 {
        return Err(Error::TooLarge { what: "bitmask oracle", n: g.n(), limit: 128 });
    }
    Ok((0..g.n()).map(|v| g.neighbors(v).iter().fold(0u128, |m, &u| m | 1 << u)).collect())
}

fn flood(adj: &[u128], start: usize, allowed: u128) -> u128 {
    let mut comp = 1u128 << start;
    let mut frontier = comp;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adj[v] & allowed & !comp;
        comp |= new;
        frontier |= new;
    }
    comp
}

fn bits(mut m: u128) -> Vec<usize> {
    let mut out = Vec::new();
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// Visit `k`-subsets of `0..n` in lexicographic order until `f` returns true.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if k > n {
        return false;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if f(&idx) {
            return true;
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return false;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exact vertex connectivity by enumerating separators in increasing size.
/// The first separator found in lexicographic order is the witness.
pub fn brute_force_vc(g: &Graph, limit: usize) -> Result<OracleAnswer> {
    let n = g.n();
    if n == 0 {
        return invalid("empty graph");
    }
    if n > limit {
        return Err(Error::TooLarge { what: "brute-force vertex connectivity", n, limit });
    }
    let adj = masks(g)?;
    let full: u128 = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut found = None;
    for k in 0..n.saturating_sub(1) {
        let hit = for_each_combination(n, k, |sep| {
            let smask = sep.iter().fold(0u128, |m, &v| m | 1 << v);
            let rest = full & !smask;
            let start = rest.trailing_zeros() as usize;
            let comp = flood(&adj, start, rest);
            if comp != rest {
                found = Some(VertexCut::from_separator(g, sep, start));
                true
            } else {
                false
            }
        });
        if hit {
            break;
        }
    }
    Ok(match found {
        Some(cut) => OracleAnswer { kappa: cut.size, witness: cut, paths: None },
        None => OracleAnswer { kappa: n - 1, witness: VertexCut::degenerate(n), paths: None },
    })
}

/// Exact minimum `t`-sink cut: `t ∈ R`. Degenerate when `t` is adjacent to all.
pub fn brute_force_sink_cut(g: &Graph, t: usize, limit: usize) -> Result<OracleAnswer> {
    let n = g.n();
    if t >= n {
        return invalid("sink out of range");
    }
    if n > limit {
        return Err(Error::TooLarge { what: "brute-force sink cut", n, limit });
    }
    let adj = masks(g)?;
    let full: u128 = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let others: Vec<usize> = (0..n).filter(|&v| v != t).collect();
    let mut found = None;
    for k in 0..n.saturating_sub(1) {
        let hit = for_each_combination(others.len(), k, |idx| {
            let sep: Vec<usize> = idx.iter().map(|&i| others[i]).collect();
            let smask = sep.iter().fold(0u128, |m, &v| m | 1 << v);
            let rest = full & !smask;
            let tcomp = flood(&adj, t, rest);
            let outside = rest & !tcomp;
            if outside != 0 {
                found = Some(VertexCut::from_separator(g, &sep, outside.trailing_zeros() as usize));
                true
            } else {
                false
            }
        });
        if hit {
            break;
        }
    }
    Ok(match found {
        Some(cut) => OracleAnswer { kappa: cut.size, witness: cut, paths: None },
        None => OracleAnswer { kappa: n - 1, witness: VertexCut::degenerate_for_sink(n, t), paths: None },
    })
}

/// Minimum of `|N(L)|` over nonempty `L ⊆ candidates` accepted by `keep`.
/// Ties prefer smaller `|L|`, then the lexicographically smallest `L`.
pub fn brute_force_min_neighbor_where(
    g: &Graph,
    candidates: &[usize],
    limit: usize,
    mut keep: impl FnMut(&[usize]) -> bool,
) -> Result<Option<(Vec<usize>, usize)>> {
    let k = candidates.len();
    if k > limit {
        return Err(Error::TooLarge { what: "brute-force minimum neighborhood", n: k, limit });
    }
    if candidates.iter().any(|&v| v >= g.n()) {
        return invalid("candidate vertex out of range");
    }
    let adj = masks(g)?;
    let mut best: Option<(usize, Vec<usize>)> = None;
    for mask in 1u64..(1u64 << k) {
        let mut lmask = 0u128;
        let mut nmask = 0u128;
        let mut m = mask;
        while m != 0 {
            let v = candidates[m.trailing_zeros() as usize];
            lmask |= 1 << v;
            nmask |= adj[v];
            m &= m - 1;
        }
        let size = (nmask & !lmask).count_ones() as usize;
        if let Some((bs, bl)) = &best {
            if size > *bs || (size == *bs && lmask.count_ones() as usize > bl.len()) {
                continue;
            }
        }
        let set = bits(lmask);
        if !keep(&set) {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bs, bl)) => (size, set.len(), &set) < (*bs, bl.len(), bl),
        };
        if better {
            best = Some((size, set));
        }
    }
    Ok(best.map(|(s, l)| (l, s)))
}

/// Minimum of `|N(L)|` over nonempty `L ⊆ candidates`.
pub fn brute_force_min_neighbor(g: &Graph, candidates: &[usize], limit: usize) -> Result<(Vec<usize>, usize)> {
    if candidates.is_empty() {
        return invalid("candidate set is empty");
    }
    let mut c = candidates.to_vec();
    c.sort_unstable();
    c.dedup();
    Ok(brute_force_min_neighbor_where(g, &c, limit, |_| true)?.expect("nonempty candidates"))
}

/// Local vertex connectivity `κ(s, t)` by max-flow, with Menger paths.
/// Adjacent pairs return `n - 1` and no paths.
pub fn flow_st_kappa(g: &Graph, s: usize, t: usize) -> Result<OracleAnswer> {
    let n = g.n();
    if s >= n || t >= n || s == t {
        return invalid("need two distinct in-range vertices");
    }
    if g.has_edge(s, t) {
        return Ok(OracleAnswer { kappa: n - 1, witness: VertexCut::degenerate_for_sink(n, t), paths: None });
    }
    let mut net = SplitNetwork::new(g, s, t);
    let kappa = net.max_flow(usize::MAX / 8);
    let sep = net.min_separator(n);
    let paths = net.paths(s);
    Ok(OracleAnswer { kappa, witness: VertexCut::from_separator(g, &sep, s), paths: Some(paths) })
}

/// `κ(s, t)` for a non-adjacent pair, stopping once it reaches `limit`.
pub fn flow_st_kappa_bounded(g: &Graph, s: usize, t: usize, limit: usize) -> usize {
    SplitNetwork::new(g, s, t).max_flow(limit)
}

/// Exact global vertex connectivity by max-flow: pairs `(v, w)` for the
/// minimum-degree vertex `v` and every `w ∉ N[v]`, plus non-adjacent pairs
/// inside `N(v)`. Each flow stops at the best value found so far.
pub fn flow_global_kappa(g: &Graph) -> Result<OracleAnswer> {
    let n = g.n();
    if n < 2 {
        return invalid("global connectivity needs n >= 2");
    }
    let comps = g.components();
    if comps.len() > 1 {
        let cut = VertexCut::from_left(g, &comps[1]);
        return Ok(OracleAnswer { kappa: 0, witness: cut, paths: None });
    }
    let (v, delta) = g.min_degree().expect("n >= 2");
    if delta == n - 1 {
        return Ok(OracleAnswer { kappa: n - 1, witness: VertexCut::degenerate(n), paths: None });
    }
    let mut best = delta;
    let mut best_pair: Option<(usize, usize)> = None;
    let consider = |a: usize, b: usize, best: &mut usize, best_pair: &mut Option<(usize, usize)>| {
        let k = flow_st_kappa_bounded(g, a, b, *best);
        if k < *best {
            *best = k;
            *best_pair = Some((a, b));
        }
    };
    for w in 0..n {
        if w != v && !g.has_edge(v, w) {
            consider(v, w, &mut best, &mut best_pair);
        }
    }
    let nv = g.neighbors(v);
    for (i, &x) in nv.iter().enumerate() {
        for &y in &nv[i + 1..] {
            if !g.has_edge(x, y) {
                consider(x, y, &mut best, &mut best_pair);
            }
        }
    }
    match best_pair {
        None => Ok(OracleAnswer { kappa: delta, witness: VertexCut::from_left(g, &[v]), paths: None }),
        Some((a, b)) => {
            let ans = flow_st_kappa(g, a, b)?;
            debug_assert_eq!(ans.kappa, best);
            Ok(ans)
        }
    }
}
