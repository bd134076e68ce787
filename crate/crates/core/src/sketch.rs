//! Linear sketches for sparse recovery and approximate neighborhood differences.
//!
//! A [`LinearSketch`] of a vector `v ∈ Z^n` is a fixed linear map of `v` into
//! cells over `Z_p` (`p = 2^61 - 1`). Each repetition hashes coordinates into
//! `2s` buckets, and each bucket keeps `Σ v_i`, `Σ i·v_i` and `Σ v_i·z^i`.
//! Recovery peels buckets that hold a single coordinate and succeeds only when
//! the residual sketch is exactly zero and at most `s` coordinates were found.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{invalid, Error, Result};
use crate::field::{PrimeField, P61};
use crate::graph::Graph;
use crate::rng;

const MAGIC: &[u8; 4] = b"VCSK";
const VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 4 + 8 + 4 + 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct RepParams {
    a: u64,
    b: u64,
    z: u64,
}

/// Shared randomness of all sketches with the same `(n, s, seed)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SketchFamily {
    n: usize,
    s: usize,
    seed: u64,
    reps: usize,
    buckets: usize,
    params: Vec<RepParams>,
}

pub fn default_reps(n: usize) -> usize {
    (usize::BITS - n.max(1).leading_zeros()) as usize + 4
}

impl SketchFamily {
    pub fn new(n: usize, s: usize, seed: u64) -> Result<Arc<Self>> {
        if n == 0 || s == 0 {
            return invalid("sketch dimension and sparsity must be positive");
        }
        if n as u64 >= P61 {
            return invalid("sketch dimension too large for the field");
        }
        let reps = default_reps(n);
        let mut r = rng::rng(seed, &[0x5e7c, n as u64, s as u64]);
        let params = (0..reps)
            .map(|_| RepParams { a: r.gen_range(1..P61), b: r.gen_range(0..P61), z: r.gen_range(2..P61) })
            .collect();
        Ok(Arc::new(SketchFamily { n, s, seed, reps, buckets: 2 * s, params }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sparsity(&self) -> usize {
        self.s
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn cell_count(&self) -> usize {
        3 * self.reps * self.buckets
    }

    #[inline]
    fn bucket(&self, f: &PrimeField, rep: usize, i: usize) -> usize {
        let p = self.params[rep];
        (f.add(f.mul(p.a, i as u64), p.b) % self.buckets as u64) as usize
    }

    fn update(&self, f: &PrimeField, cells: &mut [u64], i: usize, value: u64) {
        for rep in 0..self.reps {
            let base = 3 * (rep * self.buckets + self.bucket(f, rep, i));
            cells[base] = f.add(cells[base], value);
            cells[base + 1] = f.add(cells[base + 1], f.mul(value, i as u64));
            let zi = f.pow(self.params[rep].z, i as u64);
            cells[base + 2] = f.add(cells[base + 2], f.mul(value, zi));
        }
    }

    /// Sketch of a signed sparse vector given as `(index, value)` pairs.
    pub fn sketch_signed(self: &Arc<Self>, entries: &[(usize, i64)]) -> Result<LinearSketch> {
        let f = PrimeField::default();
        let mut cells = vec![0; self.cell_count()];
        for &(i, v) in entries {
            if i >= self.n {
                return invalid(format!("coordinate {i} out of range for n = {}", self.n));
            }
            self.update(&f, &mut cells, i, f.from_i64(v));
        }
        Ok(LinearSketch { family: Arc::clone(self), cells })
    }

    /// Sketch of the indicator vector of `set`.
    pub fn sketch_set(self: &Arc<Self>, set: &[usize]) -> Result<LinearSketch> {
        let entries: Vec<(usize, i64)> = set.iter().map(|&i| (i, 1)).collect();
        self.sketch_signed(&entries)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSketch {
    family: Arc<SketchFamily>,
    cells: Vec<u64>,
}

impl LinearSketch {
    pub fn family(&self) -> &Arc<SketchFamily> {
        &self.family
    }

    fn check_compatible(&self, other: &LinearSketch) -> Result<()> {
        let (a, b) = (&self.family, &other.family);
        if (a.n, a.s, a.seed) != (b.n, b.s, b.seed) {
            return Err(Error::Incompatible(format!(
                "(n, s, seed) = ({}, {}, {}) vs ({}, {}, {})",
                a.n, a.s, a.seed, b.n, b.s, b.seed
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &LinearSketch) -> Result<LinearSketch> {
        self.check_compatible(other)?;
        let f = PrimeField::default();
        let cells = self.cells.iter().zip(&other.cells).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(LinearSketch { family: Arc::clone(&self.family), cells })
    }

    pub fn sub(&self, other: &LinearSketch) -> Result<LinearSketch> {
        self.check_compatible(other)?;
        let f = PrimeField::default();
        let cells = self.cells.iter().zip(&other.cells).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(LinearSketch { family: Arc::clone(&self.family), cells })
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(|&c| c == 0)
    }

    /// The sketched vector as sorted `(index, value)` pairs, or `None` (⊥) when
    /// it has more than `s` nonzeros or cannot be decoded.
    pub fn recover(&self) -> Option<Vec<(usize, i64)>> {
        let fam = &self.family;
        let f = PrimeField::default();
        // Each repetition has at most one nonempty bucket per nonzero.
        for rep in self.cells.chunks_exact(3 * fam.buckets) {
            if rep.chunks_exact(3).filter(|b| b.iter().any(|&c| c != 0)).count() > fam.s {
                return None;
            }
        }
        let mut work = self.cells.clone();
        let mut found: BTreeMap<usize, i64> = BTreeMap::new();
        let limit = 2 * fam.s + fam.reps;
        let mut peeled = 0;
        loop {
            let mut progress = false;
            for rep in 0..fam.reps {
                for bucket in 0..fam.buckets {
                    let base = 3 * (rep * fam.buckets + bucket);
                    let c0 = work[base];
                    if c0 == 0 {
                        continue;
                    }
                    let i = f.mul(work[base + 1], f.inv(c0).expect("nonzero"));
                    if i >= fam.n as u64 || fam.bucket(&f, rep, i as usize) != bucket {
                        continue;
                    }
                    if work[base + 2] != f.mul(c0, f.pow(fam.params[rep].z, i)) {
                        continue;
                    }
                    fam.update(&f, &mut work, i as usize, f.neg(c0));
                    *found.entry(i as usize).or_insert(0) += f.to_i64(c0);
                    progress = true;
                    peeled += 1;
                    if peeled > limit {
                        return None;
                    }
                }
            }
            if !progress {
                break;
            }
        }
        if work.iter().any(|&c| c != 0) {
            return None;
        }
        let out: Vec<(usize, i64)> = found.into_iter().filter(|&(_, v)| v != 0).collect();
        (out.len() <= fam.s).then_some(out)
    }

    /// Serialized size in bits.
    pub fn bit_len(&self) -> usize {
        8 * (HEADER_LEN + 8 * self.cells.len())
    }

    /// `VCSK`, version, `s: u32`, `seed: u64`, `n: u32`, `len: u32`, then `len`
    /// little-endian `u64` cells.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.cells.len());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&(self.family.s as u32).to_le_bytes());
        out.extend_from_slice(&self.family.seed.to_le_bytes());
        out.extend_from_slice(&(self.family.n as u32).to_le_bytes());
        out.extend_from_slice(&(self.cells.len() as u32).to_le_bytes());
        for c in &self.cells {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<LinearSketch> {
        let err = |m: &str| Err(Error::Decode(m.to_string()));
        if bytes.len() < HEADER_LEN {
            return err("truncated header");
        }
        if &bytes[0..4] != MAGIC {
            return err("bad magic");
        }
        if bytes[4] != VERSION {
            return err("unsupported version");
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes")) as usize;
        let s = u32_at(5);
        let seed = u64::from_le_bytes(bytes[9..17].try_into().expect("8 bytes"));
        let n = u32_at(17);
        let len = u32_at(21);
        if n == 0 || s == 0 || s > n.max(1) * 2 {
            return err("invalid (n, s) in header");
        }
        let reps = default_reps(n);
        if len != 3 * reps * 2 * s {
            return err("cell count does not match (n, s)");
        }
        if bytes.len() != HEADER_LEN + 8 * len {
            return err("payload length mismatch");
        }
        let cells: Vec<u64> = bytes[HEADER_LEN..]
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        if cells.iter().any(|&c| c >= P61) {
            return err("cell value outside the field");
        }
        Ok(LinearSketch { family: SketchFamily::new(n, s, seed)?, cells })
    }
}

/// Sketch the indicator of `set ⊆ [n]` with sparsity `s`.
pub fn build_sketch(set: &[usize], n: usize, s: usize, seed: u64) -> Result<LinearSketch> {
    SketchFamily::new(n, s, seed)?.sketch_set(set)
}

pub fn sparse_recover(sketch: &LinearSketch) -> Option<Vec<(usize, i64)>> {
    sketch.recover()
}

/// Nested coordinate samples with one sparse sketch per level.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxFamily {
    n: usize,
    threshold: f64,
    rank: Vec<usize>,
    levels: Vec<(usize, Arc<SketchFamily>)>,
}

impl ApproxFamily {
    /// Levels of size `1, 2, 4, ...` below `n`, then the full coordinate set;
    /// per-level sparsity `min(⌈log² n⌉, size)`. An estimate is taken from the
    /// first level whose recovered count exceeds `threshold · log n`.
    pub fn new(n: usize, seed: u64, threshold: f64) -> Result<Arc<Self>> {
        if n == 0 {
            return invalid("dimension must be positive");
        }
        let log = (n.max(2) as f64).log2();
        let s = (log * log).ceil() as usize;
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng::rng(seed, &[0xa9d]));
        let mut rank = vec![0; n];
        for (pos, &i) in perm.iter().enumerate() {
            rank[i] = pos;
        }
        let mut sizes = Vec::new();
        let mut size = 1;
        while size < n {
            sizes.push(size);
            size *= 2;
        }
        sizes.push(n);
        let levels = sizes
            .into_iter()
            .enumerate()
            .map(|(l, size)| Ok((size, SketchFamily::new(n, s.min(size).max(1), rng::derive(seed, &[l as u64]))?)))
            .collect::<Result<_>>()?;
        Ok(Arc::new(ApproxFamily { n, threshold, rank, levels }))
    }

    pub fn sketch_set(self: &Arc<Self>, set: &[usize]) -> Result<ApproxDiffSketch> {
        let levels = self
            .levels
            .iter()
            .map(|(size, fam)| {
                let sub: Vec<usize> = set.iter().copied().filter(|&i| i < self.n && self.rank[i] < *size).collect();
                fam.sketch_set(&sub)
            })
            .collect::<Result<_>>()?;
        if set.iter().any(|&i| i >= self.n) {
            return invalid("coordinate out of range");
        }
        Ok(ApproxDiffSketch { family: Arc::clone(self), levels })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxDiffSketch {
    family: Arc<ApproxFamily>,
    levels: Vec<LinearSketch>,
}

impl ApproxDiffSketch {
    /// Estimate of `|A △ B|` for the sketched sets, or `None` if no level decodes.
    pub fn approx_difference(&self, other: &ApproxDiffSketch) -> Result<Option<f64>> {
        let fam = &self.family;
        if !Arc::ptr_eq(fam, &other.family) && **fam != *other.family {
            return Err(Error::Incompatible("different approximate sketch families".into()));
        }
        let cutoff = fam.threshold * (fam.n.max(2) as f64).log2();
        let mut last: Option<f64> = None;
        for (l, (size, _)) in fam.levels.iter().enumerate() {
            let diff = self.levels[l].sub(&other.levels[l])?;
            let Some(entries) = diff.recover() else {
                continue;
            };
            let count = entries.len() as f64;
            if *size == fam.n {
                return Ok(Some(count));
            }
            let scaled = count * fam.n as f64 / *size as f64;
            if count > cutoff {
                return Ok(Some(scaled));
            }
            last = Some(scaled);
        }
        Ok(last)
    }
}

/// Source of (approximate) neighborhood differences.
pub trait DifferenceOracle {
    fn apd(&self, g: &Graph, u: usize, v: usize) -> f64;
}

/// Exact `|N(u) △ N(v)|`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactDifference;

impl DifferenceOracle for ExactDifference {
    fn apd(&self, g: &Graph, u: usize, v: usize) -> f64 {
        if u == v {
            0.0
        } else {
            g.neighborhood_symmetric_difference(u, v).len() as f64
        }
    }
}

/// Per-vertex approximate sketches of `N(v)`.
#[derive(Debug, Clone)]
pub struct SketchedDifference {
    sketches: Vec<ApproxDiffSketch>,
}

impl SketchedDifference {
    pub fn build(g: &Graph, seed: u64, threshold: f64) -> Result<Self> {
        let fam = ApproxFamily::new(g.n().max(1), seed, threshold)?;
        let sketches = (0..g.n()).map(|v| fam.sketch_set(g.neighbors(v))).collect::<Result<_>>()?;
        Ok(SketchedDifference { sketches })
    }
}

impl DifferenceOracle for SketchedDifference {
    fn apd(&self, _g: &Graph, u: usize, v: usize) -> f64 {
        if u == v {
            return 0.0;
        }
        self.sketches[u]
            .approx_difference(&self.sketches[v])
            .ok()
            .flatten()
            .unwrap_or(f64::INFINITY)
    }
}
