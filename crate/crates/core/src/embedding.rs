//! Algebraic `s`-`t` vertex connectivity: a random modular embedding of the
//! graph anchored at `N(t)`, where `κ(s, t)` equals the rank of the lifted
//! vectors of `N(s)`, and a rank structure answering "rank ≥ k" after
//! low-rank column updates through the matrix determinant lemma.

use rand::Rng as _;

use crate::error::{invalid, Error, Result};
use crate::field::{Matrix, PrimeField};
use crate::graph::{Graph, GraphBuilder};
use crate::minnncc::{batched_boundary_sparsify, sample_count, MinNnccConfig};
use crate::rng;

const RESAMPLE_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularEmbedding {
    pub field: PrimeField,
    pub t: usize,
    /// `N(t)` sorted; the first maps to the origin, the `i`-th to `e_i`.
    pub anchors: Vec<usize>,
    /// Position of each vertex, `None` when unreachable from the anchors in `G - t`.
    pub f: Vec<Option<Vec<u64>>>,
    /// Edge coefficients aligned with `g.neighbors(v)`; symmetric.
    pub coeffs: Vec<Vec<u64>>,
    pub seed: u64,
}

impl ModularEmbedding {
    pub fn dim(&self) -> usize {
        self.anchors.len().saturating_sub(1)
    }

    /// `(f(v), 1)`.
    pub fn lifted(&self, v: usize) -> Option<Vec<u64>> {
        self.f[v].as_ref().map(|x| {
            let mut y = x.clone();
            y.push(1);
            y
        })
    }

    /// For every embedded non-anchor `v`: `(Σ c_vu) f(v) = Σ c_vu f(u)` exactly.
    pub fn check_affine_invariant(&self, g: &Graph) -> bool {
        let fld = &self.field;
        let is_anchor = |v: usize| self.anchors.binary_search(&v).is_ok();
        for v in 0..g.n() {
            if v == self.t || is_anchor(v) {
                continue;
            }
            let Some(fv) = &self.f[v] else {
                continue;
            };
            let mut total = 0;
            let mut acc = vec![0u64; self.dim()];
            for (idx, &u) in g.neighbors(v).iter().enumerate() {
                let c = self.coeffs[v][idx];
                let Some(fu) = &self.f[u] else {
                    return false;
                };
                total = fld.add(total, c);
                for (a, &x) in acc.iter_mut().zip(fu) {
                    *a = fld.add(*a, fld.mul(c, x));
                }
            }
            if fv.iter().zip(&acc).any(|(&x, &a)| fld.mul(total, x) != a) {
                return false;
            }
        }
        true
    }
}

fn draw_coefficients(g: &Graph, field: &PrimeField, seed: u64, attempt: usize) -> Vec<Vec<u64>> {
    let mut r = rng::rng(seed, &[0xe3b, attempt as u64]);
    let p = field.modulus();
    let mut coeffs: Vec<Vec<u64>> = (0..g.n()).map(|v| vec![0; g.degree(v)]).collect();
    for (u, v) in g.edges() {
        let c = r.gen_range(1..p);
        let iu = g.neighbors(u).binary_search(&v).expect("edge");
        let iv = g.neighbors(v).binary_search(&u).expect("edge");
        coeffs[u][iu] = c;
        coeffs[v][iv] = c;
    }
    coeffs
}

/// Embed `G - t` into `Z_p^{|N(t)| - 1}` with anchors `N(t)`.
pub fn random_modular_embedding(g: &Graph, t: usize, seed: u64, field: PrimeField) -> Result<ModularEmbedding> {
    let n = g.n();
    if t >= n {
        return invalid("sink out of range");
    }
    let anchors: Vec<usize> = g.neighbors(t).to_vec();
    if anchors.is_empty() {
        return invalid("sink must have at least one neighbor");
    }
    let dim = anchors.len() - 1;
    let mut blocked = vec![false; n];
    blocked[t] = true;
    let mut reach = vec![false; n];
    for &a in &anchors {
        if !reach[a] {
            for v in g.component_avoiding(a, &blocked) {
                reach[v] = true;
            }
        }
    }
    let mut anchor_pos = vec![usize::MAX; n];
    for (i, &a) in anchors.iter().enumerate() {
        anchor_pos[a] = i;
    }
    let inner: Vec<usize> = (0..n).filter(|&v| reach[v] && anchor_pos[v] == usize::MAX).collect();
    let mut idx = vec![usize::MAX; n];
    for (i, &v) in inner.iter().enumerate() {
        idx[v] = i;
    }
    let anchor_vec = |i: usize| -> Vec<u64> {
        let mut x = vec![0; dim];
        if i > 0 {
            x[i - 1] = 1;
        }
        x
    };
    for attempt in 0..RESAMPLE_ATTEMPTS {
        let coeffs = draw_coefficients(g, &field, seed, attempt);
        let k = inner.len();
        let mut a = Matrix::zeros(k, k);
        let mut rhs = Matrix::zeros(k, dim);
        for (row, &v) in inner.iter().enumerate() {
            let mut total = 0;
            for (j, &u) in g.neighbors(v).iter().enumerate() {
                let c = coeffs[v][j];
                total = field.add(total, c);
                if idx[u] != usize::MAX {
                    let cur = a.get(row, idx[u]);
                    a.set(row, idx[u], field.sub(cur, c));
                } else if anchor_pos[u] != usize::MAX {
                    for (d, x) in anchor_vec(anchor_pos[u]).into_iter().enumerate() {
                        if x != 0 {
                            let cur = rhs.get(row, d);
                            rhs.set(row, d, field.add(cur, c));
                        }
                    }
                }
            }
            let cur = a.get(row, row);
            a.set(row, row, field.add(cur, total));
        }
        let sol = match a.solve(&field, &rhs) {
            Ok(s) => s,
            Err(Error::Singular(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut f = vec![None; n];
        for (i, &x) in anchors.iter().enumerate() {
            f[x] = Some(anchor_vec(i));
        }
        for (row, &v) in inner.iter().enumerate() {
            f[v] = Some((0..dim).map(|d| sol.get(row, d)).collect());
        }
        return Ok(ModularEmbedding { field, t, anchors, f, coeffs, seed });
    }
    Err(Error::Singular(format!("embedding system singular after {RESAMPLE_ATTEMPTS} draws")))
}

/// `κ(s, t)` as the rank of the lifted vectors of `N(s)`; `0` when `s` is
/// unreachable from `N(t)` in `G - t`.
pub fn kappa_via_rank(emb: &ModularEmbedding, g: &Graph, s: usize) -> Result<usize> {
    if s >= g.n() || s == emb.t || g.has_edge(s, emb.t) {
        return invalid("source must be a vertex outside N[t]");
    }
    if emb.f[s].is_none() {
        return Ok(0);
    }
    let rows: Vec<Vec<u64>> = g.neighbors(s).iter().filter_map(|&u| emb.lifted(u)).collect();
    if rows.is_empty() {
        return Ok(0);
    }
    Ok(Matrix::from_rows(rows)?.rank(&emb.field))
}

/// Tests whether `rank(M + U Vᵀ) ≥ k` for column-selector updates `V`.
#[derive(Debug, Clone)]
pub struct RankDs {
    pub field: PrimeField,
    pub rows: usize,
    pub cols: usize,
    /// Padded square size.
    pub size: usize,
    pub k: usize,
    m: Matrix,
    x: Matrix,
    y: Matrix,
    inv: Option<Matrix>,
}

fn block_matrix(ds_m: &Matrix, x: &Matrix, y: &Matrix, q: usize) -> Matrix {
    let n = ds_m.rows;
    let mut f = Matrix::zeros(3 * n, 3 * n);
    for r in 0..n {
        for c in 0..n {
            f.set(r, c, ds_m.get(r, c));
            f.set(r, n + c, x.get(r, c));
            f.set(n + r, c, y.get(r, c));
        }
        f.set(n + r, 2 * n + r, 1);
        f.set(2 * n + r, n + r, 1);
        if r < q {
            f.set(2 * n + r, 2 * n + r, 1);
        }
    }
    f
}

fn pad(m: &Matrix, size: usize) -> Matrix {
    let mut out = Matrix::zeros(size, size);
    for r in 0..m.rows {
        for c in 0..m.cols {
            out.set(r, c, m.get(r, c));
        }
    }
    out
}

/// Build the structure for `M` (`rows × cols`) and threshold `k`. The matrix
/// is padded to a square of side `max(rows, cols)`.
pub fn rank_ds_construct(m: &Matrix, k: usize, seed: u64, field: PrimeField) -> Result<RankDs> {
    let size = m.rows.max(m.cols);
    if size == 0 {
        return invalid("matrix must be nonempty");
    }
    if k > size {
        return invalid(format!("threshold {k} exceeds matrix side {size}"));
    }
    let mut r = rng::rng(seed, &[0x4a7]);
    let p = field.modulus();
    let mut random = || {
        let mut a = Matrix::zeros(size, size);
        a.data.iter_mut().for_each(|x| *x = r.gen_range(0..p));
        a
    };
    let x = random();
    let y = random();
    let padded = pad(m, size);
    let inv = block_matrix(&padded, &x, &y, size - k).inverse(&field)?;
    Ok(RankDs { field, rows: m.rows, cols: m.cols, size, k, m: padded, x, y, inv })
}

impl RankDs {
    /// Whether `rank(M) ≥ k` (with high probability).
    pub fn base_rank_at_least(&self) -> bool {
        self.inv.is_some()
    }

    fn selected_rows(&self, u: &Matrix, v: &Matrix) -> Result<Vec<usize>> {
        if u.rows != self.rows || v.rows != self.cols || u.cols != v.cols {
            return invalid("update dimensions do not match the base matrix");
        }
        let mut rows = Vec::with_capacity(v.cols);
        let mut used = vec![false; v.rows];
        for c in 0..v.cols {
            let mut hit = None;
            for r in 0..v.rows {
                match v.get(r, c) {
                    0 => {}
                    1 if hit.is_none() => hit = Some(r),
                    _ => return invalid("selector columns must hold exactly one 1"),
                }
            }
            let Some(r) = hit else {
                return invalid("selector column without a 1");
            };
            if used[r] {
                return invalid("selector rows may hold at most one 1");
            }
            used[r] = true;
            rows.push(r);
        }
        Ok(rows)
    }

    /// `rank(M + U Vᵀ) ≥ k` via `det(I + V₀ᵀ f(M)⁻¹ U₀) ≠ 0`. When `f(M)`
    /// itself was singular, falls back to [`RankDs::query_direct`].
    pub fn query(&self, u: &Matrix, v: &Matrix) -> Result<bool> {
        let sel = self.selected_rows(u, v)?;
        let Some(inv) = &self.inv else {
            return self.query_direct(u, v);
        };
        let f = &self.field;
        let a = sel.len();
        let mut q = Matrix::identity(a);
        for (i, &r) in sel.iter().enumerate() {
            for j in 0..a {
                let mut acc = q.get(i, j);
                for l in 0..self.rows {
                    acc = f.add(acc, f.mul(inv.get(r, l), u.get(l, j)));
                }
                q.set(i, j, acc);
            }
        }
        Ok(q.det(f)? != 0)
    }

    /// Same answer by eliminating `f(M + U Vᵀ)` directly.
    pub fn query_direct(&self, u: &Matrix, v: &Matrix) -> Result<bool> {
        self.selected_rows(u, v)?;
        let uv = u.mul(&self.field, &v.transpose())?;
        let updated = self.m.add(&self.field, &pad(&uv, self.size))?;
        let fm = block_matrix(&updated, &self.x, &self.y, self.size - self.k);
        Ok(fm.det(&self.field)? != 0)
    }
}

/// Column-slot view of the lifted neighborhood vectors: column `u` holds
/// `(f(u), 1)` for `u ∈ N(s)` and zero otherwise.
fn neighborhood_matrix(emb: &ModularEmbedding, g: &Graph, s: usize) -> Matrix {
    let rows = emb.dim() + 1;
    let mut m = Matrix::zeros(rows, g.n());
    for &u in g.neighbors(s) {
        if let Some(col) = emb.lifted(u) {
            for (r, x) in col.into_iter().enumerate() {
                m.set(r, u, x);
            }
        }
    }
    m
}

/// Rank-threshold oracle for `κ(s', t) ≥ k`, built once around a base source
/// and queried with the column changes `N(s) △ N(s')`.
pub struct ConnectivityOracle<'a> {
    emb: &'a ModularEmbedding,
    base: usize,
    ds: RankDs,
}

impl<'a> ConnectivityOracle<'a> {
    pub fn new(emb: &'a ModularEmbedding, g: &Graph, base: usize, k: usize, seed: u64) -> Result<Self> {
        if base >= g.n() || base == emb.t || g.has_edge(base, emb.t) {
            return invalid("base source must be a vertex outside N[t]");
        }
        let m = neighborhood_matrix(emb, g, base);
        let ds = rank_ds_construct(&m, k.min(m.rows.max(m.cols)), seed, emb.field)?;
        Ok(ConnectivityOracle { emb, base, ds })
    }

    /// Low-rank update `(U, V)` turning the base matrix into that of `s`.
    pub fn update_for(&self, g: &Graph, s: usize) -> (Matrix, Matrix) {
        let diff = g.neighborhood_symmetric_difference(self.base, s);
        let f = &self.emb.field;
        let rows = self.emb.dim() + 1;
        let mut u = Matrix::zeros(rows, diff.len());
        let mut v = Matrix::zeros(g.n(), diff.len());
        let base_nbrs = g.neighbors(self.base);
        for (j, &w) in diff.iter().enumerate() {
            v.set(w, j, 1);
            let Some(col) = self.emb.lifted(w) else {
                continue;
            };
            let removing = base_nbrs.binary_search(&w).is_ok();
            for (r, x) in col.into_iter().enumerate() {
                u.set(r, j, if removing { f.neg(x) } else { x });
            }
        }
        (u, v)
    }

    /// Whether `κ(s, t) ≥ k`.
    pub fn at_least(&self, g: &Graph, s: usize) -> Result<bool> {
        if s >= g.n() || s == self.emb.t || g.has_edge(s, self.emb.t) {
            return invalid("source must be a vertex outside N[t]");
        }
        if self.ds.k == 0 {
            return Ok(true);
        }
        if self.emb.f[s].is_none() {
            return Ok(false);
        }
        let (u, v) = self.update_for(g, s);
        if v.cols == 0 {
            return Ok(self.ds.base_rank_at_least());
        }
        self.ds.query(&u, &v)
    }
}

/// Demonstration path for minimum neighborhood cuts: sample sources as the
/// matching-based routine does, sparsify the boundary, embed `G[C ∪ C']` plus
/// a sink on `C'`, and binary-search the smallest `k` with some source below it.
pub fn min_nncc_via_embedding(
    g: &Graph,
    c: &[usize],
    ell: usize,
    cfg: &MinNnccConfig,
    seed: u64,
    field: PrimeField,
) -> Result<usize> {
    use rand::seq::SliceRandom;
    let mut c = c.to_vec();
    c.sort_unstable();
    c.dedup();
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
    if sp.c_prime.is_empty() {
        return Ok(sp.k);
    }
    let verts: Vec<usize> = c.iter().chain(&sp.c_prime).copied().collect();
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in verts.iter().enumerate() {
        local[v] = i;
    }
    let mut b = GraphBuilder::new(verts.len());
    for &v in &c {
        for &w in g.neighbors(v) {
            if local[w] != usize::MAX {
                b.add_edge(local[v], local[w]);
            }
        }
    }
    let t = b.add_vertex();
    for &w in &sp.c_prime {
        b.add_edge(local[w], t);
    }
    let h = b.build();
    let emb = random_modular_embedding(&h, t, rng::derive(seed, &[0xe1]), field)?;
    let sources: Vec<usize> = sampled.iter().map(|&x| local[x]).collect();
    let base = sources[0];
    // Largest k such that every source has κ ≥ k.
    let (mut lo, mut hi) = (0usize, sp.c_prime.len());
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        let oracle = ConnectivityOracle::new(&emb, &h, base, mid, rng::derive(seed, &[0xd5, mid as u64]))?;
        let mut all = true;
        for &x in &sources {
            if !oracle.at_least(&h, x)? {
                all = false;
                break;
            }
        }
        if all {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo + sp.k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::flow_st_kappa;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn cycle_connectivity_is_two() {
        let g = cycle(6);
        let emb = random_modular_embedding(&g, 0, 3, PrimeField::default()).unwrap();
        assert!(emb.check_affine_invariant(&g));
        assert_eq!(kappa_via_rank(&emb, &g, 3).unwrap(), 2);
        assert_eq!(flow_st_kappa(&g, 3, 0).unwrap().kappa, 2);
    }

    #[test]
    fn unreachable_source_is_zero() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let emb = random_modular_embedding(&g, 0, 1, PrimeField::default()).unwrap();
        assert_eq!(kappa_via_rank(&emb, &g, 4).unwrap(), 0);
        assert!(kappa_via_rank(&emb, &g, 1).is_err());
    }

    #[test]
    fn isolated_sink_rejected() {
        assert!(random_modular_embedding(&Graph::new(3), 0, 0, PrimeField::default()).is_err());
    }

    #[test]
    fn rank_ds_identity_threshold() {
        let f = PrimeField::default();
        let m = Matrix::identity(4);
        assert!(rank_ds_construct(&m, 4, 1, f).unwrap().base_rank_at_least());
        let mut m3 = Matrix::identity(4);
        m3.set(3, 3, 0);
        let ds = rank_ds_construct(&m3, 4, 1, f).unwrap();
        assert!(!ds.base_rank_at_least());
        let mut u = Matrix::zeros(4, 1);
        u.set(3, 0, 1);
        let mut v = Matrix::zeros(4, 1);
        v.set(3, 0, 1);
        assert!(ds.query(&u, &v).unwrap());
        assert!(ds.query_direct(&u, &v).unwrap());
        assert!(rank_ds_construct(&m3, 3, 1, f).unwrap().base_rank_at_least());
    }

    #[test]
    fn selector_must_be_binary() {
        let f = PrimeField::default();
        let ds = rank_ds_construct(&Matrix::identity(3), 2, 0, f).unwrap();
        let u = Matrix::zeros(3, 1);
        let mut v = Matrix::zeros(3, 1);
        v.set(0, 0, 2);
        assert!(ds.query(&u, &v).is_err());
    }
}
