//! Subset-tribes instances and their gadget graphs: `√n` batches of `√n`
//! containment questions `B ⊆ A`, encoded so that `κ = n/2` exactly when some
//! batch is fully contained and `κ ≥ n/2 + 1` otherwise.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::rng;

/// `a[i][j]` and `b[i][j]` are sorted subsets of `0..r`, with `|a[i][j]| = r/2`.
/// The gadget graph has `2n = 2r²` vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetTribesInstance {
    pub r: usize,
    pub a: Vec<Vec<Vec<usize>>>,
    pub b: Vec<Vec<Vec<usize>>>,
    pub yes_expected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KappaClass {
    #[serde(rename = "EQ_n_over_2")]
    EqHalf,
    #[serde(rename = "GE_n_over_2_plus_1")]
    GeHalfPlusOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GadgetMode {
    Yes,
    No,
    Random,
}

impl std::str::FromStr for GadgetMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "yes" => Ok(GadgetMode::Yes),
            "no" => Ok(GadgetMode::No),
            "random" => Ok(GadgetMode::Random),
            _ => Err(format!("unknown mode `{s}` (expected yes, no or random)")),
        }
    }
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|x| big.binary_search(x).is_ok())
}

impl SubsetTribesInstance {
    pub fn n(&self) -> usize {
        self.r * self.r
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.r;
        if r < 2 || !r.is_multiple_of(2) {
            return invalid(format!("r = {r} must be even and at least 2"));
        }
        if self.a.len() != r || self.b.len() != r {
            return invalid("need r batches on each side");
        }
        for (ai, bi) in self.a.iter().zip(&self.b) {
            if ai.len() != r || bi.len() != r {
                return invalid("need r sets per batch");
            }
            for set in ai.iter().chain(bi) {
                if set.windows(2).any(|w| w[0] >= w[1]) || set.iter().any(|&x| x >= r) {
                    return invalid("sets must be sorted, distinct and inside 0..r");
                }
            }
            if ai.iter().any(|s| s.len() != r / 2) {
                return invalid(format!("every A set must have size {}", r / 2));
            }
        }
        Ok(())
    }
}

/// Label by direct subset checks.
pub fn evaluate_hard_instance(inst: &SubsetTribesInstance) -> KappaClass {
    let yes = inst.a.iter().zip(&inst.b).any(|(ai, bi)| ai.iter().zip(bi).all(|(a, b)| is_subset(b, a)));
    if yes {
        KappaClass::EqHalf
    } else {
        KappaClass::GeHalfPlusOne
    }
}

/// Vertex ids: `u^{(x)}_y = x·r + y`, `v^{(i)}_j = n + i·r + j`.
fn u_id(r: usize, x: usize, y: usize) -> usize {
    x * r + y
}

fn v_id(r: usize, i: usize, j: usize) -> usize {
    r * r + i * r + j
}

pub type EdgeShares = (Vec<(usize, usize)>, Vec<(usize, usize)>);

/// Alice's edges (cliques and `E_A`) and Bob's (`E_B`).
pub fn hard_instance_split(inst: &SubsetTribesInstance) -> Result<EdgeShares> {
    inst.validate()?;
    let r = inst.r;
    let n = r * r;
    if r < 10 {
        log::warn!("gadget with sqrt(n) = {r} < 10: the kappa separation is only guaranteed from 10 up");
    }
    let mut alice = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            alice.push((a, b));
        }
    }
    for i in 0..r {
        for j in 0..r {
            for k in j + 1..r {
                alice.push((v_id(r, i, j), v_id(r, i, k)));
            }
        }
    }
    let mut bob = Vec::new();
    for i in 0..r {
        for j in 0..r {
            let v = v_id(r, i, j);
            for x in (0..r).filter(|&x| x != j) {
                for &y in &inst.a[i][x] {
                    alice.push((v, u_id(r, x, y)));
                }
            }
            for &y in &inst.b[i][j] {
                bob.push((v, u_id(r, j, y)));
            }
        }
    }
    Ok((alice, bob))
}

pub fn build_hard_instance(inst: &SubsetTribesInstance) -> Result<Graph> {
    let (alice, bob) = hard_instance_split(inst)?;
    Graph::from_edges(2 * inst.r * inst.r, alice.into_iter().chain(bob))
}

/// Draw an instance. `Yes` plants one fully contained batch; `No` breaks every
/// batch with a single element outside `A`; `Random` uses independent halves.
pub fn random_instance(r: usize, mode: GadgetMode, seed: u64) -> Result<SubsetTribesInstance> {
    if r < 2 || !r.is_multiple_of(2) {
        return invalid(format!("r = {r} must be even and at least 2"));
    }
    let mut rg = rng::rng(seed, &[0x9ad9]);
    let universe: Vec<usize> = (0..r).collect();
    let half = |rg: &mut rng::Rng| {
        let mut s: Vec<usize> = universe.choose_multiple(rg, r / 2).copied().collect();
        s.sort_unstable();
        s
    };
    let a: Vec<Vec<Vec<usize>>> = (0..r).map(|_| (0..r).map(|_| half(&mut rg)).collect()).collect();
    let sub = |rg: &mut rng::Rng, of: &[usize]| -> Vec<usize> { of.iter().copied().filter(|_| rg.gen_bool(0.5)).collect() };
    let mut b: Vec<Vec<Vec<usize>>> = Vec::with_capacity(r);
    let planted = rg.gen_range(0..r);
    for i in 0..r {
        let mut batch: Vec<Vec<usize>> = a[i].iter().map(|ai| sub(&mut rg, ai)).collect();
        let break_batch = match mode {
            GadgetMode::Yes => i != planted,
            GadgetMode::No => true,
            GadgetMode::Random => false,
        };
        if break_batch {
            let j = rg.gen_range(0..r);
            let outside: Vec<usize> = (0..r).filter(|x| a[i][j].binary_search(x).is_err()).collect();
            let z = *outside.choose(&mut rg).expect("|A| = r/2 < r");
            batch[j].push(z);
            batch[j].sort_unstable();
        }
        if mode == GadgetMode::Random {
            for set in batch.iter_mut() {
                *set = universe.iter().copied().filter(|_| rg.gen_bool(0.3)).collect();
            }
        }
        b.push(batch);
    }
    let mut inst = SubsetTribesInstance { r, a, b, yes_expected: false };
    inst.yes_expected = evaluate_hard_instance(&inst) == KappaClass::EqHalf;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty_b(r: usize, seed: u64) -> SubsetTribesInstance {
        let mut inst = random_instance(r, GadgetMode::Yes, seed).unwrap();
        inst.b = vec![vec![Vec::new(); r]; r];
        inst
    }

    #[test]
    fn empty_b_is_yes() {
        assert_eq!(evaluate_hard_instance(&empty_b(4, 1)), KappaClass::EqHalf);
    }

    #[test]
    fn full_b_is_no() {
        let mut inst = empty_b(4, 2);
        inst.b = vec![vec![(0..4).collect(); 4]; 4];
        assert_eq!(evaluate_hard_instance(&inst), KappaClass::GeHalfPlusOne);
    }

    #[test]
    fn generators_hit_their_class() {
        for seed in 0..10 {
            assert!(random_instance(6, GadgetMode::Yes, seed).unwrap().yes_expected);
            assert!(!random_instance(6, GadgetMode::No, seed).unwrap().yes_expected);
        }
    }

    #[test]
    fn malformed_a_rejected() {
        let mut inst = empty_b(4, 3);
        inst.a[0][0] = vec![0];
        assert!(build_hard_instance(&inst).is_err());
        assert!(random_instance(5, GadgetMode::Yes, 0).is_err());
    }

    #[test]
    fn planted_batch_neighborhood_has_half_n() {
        let inst = empty_b(10, 4);
        let g = build_hard_instance(&inst).unwrap();
        assert_eq!(g.n(), 200);
        let batch: Vec<usize> = (0..10).map(|j| v_id(10, 0, j)).collect();
        assert_eq!(g.neighborhood(&batch).len(), 50);
    }
}
