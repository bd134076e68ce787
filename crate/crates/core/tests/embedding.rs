mod common;

use rand::Rng;
use vcframe::embedding::{kappa_via_rank, min_nncc_via_embedding, random_modular_embedding, rank_ds_construct, ConnectivityOracle};
use vcframe::field::{Matrix, PrimeField};
use vcframe::minnncc::{min_nncc, MinNnccConfig};
use vcframe::oracle::flow_st_kappa;
use vcframe::Graph;

fn field() -> PrimeField {
    PrimeField::default()
}

fn random_matrix(rows: usize, cols: usize, r: &mut impl Rng) -> Matrix {
    let p = field().modulus();
    let mut m = Matrix::zeros(rows, cols);
    m.data.iter_mut().for_each(|x| *x = r.gen_range(0..p));
    m
}

/// `rows × cols` of rank at most `k` as a product of random factors.
fn planted_rank(rows: usize, cols: usize, k: usize, r: &mut impl Rng) -> Matrix {
    random_matrix(rows, k, r).mul(&field(), &random_matrix(k, cols, r)).unwrap()
}

/// A selector picking `a` distinct columns out of `n`, plus a random `U`.
fn random_update(rows: usize, n: usize, a: usize, r: &mut impl Rng) -> (Matrix, Matrix) {
    let picks = rand::seq::index::sample(r, n, a).into_vec();
    let mut v = Matrix::zeros(n, a);
    for (j, &c) in picks.iter().enumerate() {
        v.set(c, j, 1);
    }
    (random_matrix(rows, a, r), v)
}

#[test]
fn embedding_examples() {
    let p3 = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
    let emb = random_modular_embedding(&p3, 2, 1, field()).unwrap();
    assert_eq!(emb.dim(), 0);
    assert_eq!(kappa_via_rank(&emb, &p3, 0).unwrap(), 1);

    let c4 = common::cycle(4);
    let emb = random_modular_embedding(&c4, 2, 1, field()).unwrap();
    assert_eq!(kappa_via_rank(&emb, &c4, 0).unwrap(), flow_st_kappa(&c4, 0, 2).unwrap().kappa);

    let k4e = Graph::from_edges(4, [(0, 1), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    let emb = random_modular_embedding(&k4e, 2, 1, field()).unwrap();
    assert_eq!(kappa_via_rank(&emb, &k4e, 0).unwrap(), 2);
    assert!(kappa_via_rank(&emb, &k4e, 1).is_err());
}

#[test]
fn rank_structure_examples() {
    let ds = rank_ds_construct(&Matrix::identity(4), 4, 3, field()).unwrap();
    assert!(ds.base_rank_at_least());
    let zero = rank_ds_construct(&Matrix::zeros(4, 4), 1, 3, field()).unwrap();
    assert!(!zero.base_rank_at_least());
    let mut r = common::rng(1);
    let m = planted_rank(6, 6, 3, &mut r);
    assert!(rank_ds_construct(&m, 3, 8, field()).unwrap().base_rank_at_least());
    assert!(!rank_ds_construct(&m, 4, 8, field()).unwrap().base_rank_at_least());
    assert!(rank_ds_construct(&m, 7, 8, field()).is_err());
}

#[test]
fn trivial_and_swapped_updates() {
    let mut r = common::rng(2);
    let m = planted_rank(5, 5, 3, &mut r);
    for k in [3, 4] {
        let ds = rank_ds_construct(&m, k, 5, field()).unwrap();
        let (_, v) = random_update(5, 5, 2, &mut r);
        let zero = Matrix::zeros(5, 2);
        assert_eq!(ds.query(&zero, &v).unwrap(), ds.base_rank_at_least());
        // Two equal update columns aimed at swapped slots.
        let mut u = random_matrix(5, 2, &mut r);
        for row in 0..5 {
            u.set(row, 1, u.get(row, 0));
        }
        let mut swapped = Matrix::zeros(5, 2);
        for c in 0..5 {
            swapped.set(c, 0, v.get(c, 1));
            swapped.set(c, 1, v.get(c, 0));
        }
        assert_eq!(ds.query(&u, &v).unwrap(), ds.query(&u, &swapped).unwrap());
    }
    let ds = rank_ds_construct(&m, 3, 5, field()).unwrap();
    let mut bad = Matrix::zeros(5, 1);
    bad.set(0, 0, 2);
    assert!(ds.query(&Matrix::zeros(5, 1), &bad).is_err());
}

#[test]
fn determinant_lemma_agrees_with_direct_elimination() {
    let mut r = common::rng(3);
    for case in 0..200u64 {
        let n = r.gen_range(2..=12);
        let base_rank = r.gen_range(0..=n);
        let m = planted_rank(n, n, base_rank, &mut r);
        let k = r.gen_range(1..=n);
        let ds = rank_ds_construct(&m, k, case, field()).unwrap();
        let a = r.gen_range(1..=n);
        let (u, v) = random_update(n, n, a, &mut r);
        let direct = m.add(&field(), &u.mul(&field(), &v.transpose()).unwrap()).unwrap().rank(&field()) >= k;
        assert_eq!(ds.query(&u, &v).unwrap(), ds.query_direct(&u, &v).unwrap());
        assert_eq!(ds.query(&u, &v).unwrap(), direct, "case {case}");
    }
}

#[test]
fn rank_equals_flow_and_affine_invariant_holds() {
    let mut r = common::rng(4);
    let mut trials = 0;
    let mut wrong = 0;
    for seed in 0..60u64 {
        let n = r.gen_range(6..=20);
        let g = common::gnp(n, r.gen_range(0.15..0.5), &mut r);
        let t = r.gen_range(0..n);
        if g.degree(t) == 0 {
            continue;
        }
        let emb = random_modular_embedding(&g, t, seed, field()).unwrap();
        assert!(emb.check_affine_invariant(&g));
        for s in 0..n {
            if s == t || g.has_edge(s, t) {
                continue;
            }
            trials += 1;
            wrong += (kappa_via_rank(&emb, &g, s).unwrap() != flow_st_kappa(&g, s, t).unwrap().kappa) as usize;
        }
    }
    assert!(wrong * 100 <= trials, "{wrong}/{trials}");
}

#[test]
fn connectivity_oracle_thresholds() {
    let mut r = common::rng(5);
    for seed in 0..20u64 {
        let g = common::connected_gnp(14, 0.3, &mut r);
        let t = 0;
        let others: Vec<usize> = (1..14).filter(|&s| !g.has_edge(s, t)).collect();
        if others.len() < 2 {
            continue;
        }
        let emb = random_modular_embedding(&g, t, seed, field()).unwrap();
        let base = others[0];
        for k in 1..=4 {
            let oracle = ConnectivityOracle::new(&emb, &g, base, k, seed).unwrap();
            for &s in &others {
                assert_eq!(oracle.at_least(&g, s).unwrap(), flow_st_kappa(&g, s, t).unwrap().kappa >= k);
            }
        }
    }
}

#[test]
fn embedding_search_matches_matching_route() {
    let mut r = common::rng(6);
    let mut checked = 0;
    while checked < 40 {
        let n = r.gen_range(8..=14);
        let g = common::gnp(n, r.gen_range(0.2..0.6), &mut r);
        let c: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.5)).collect();
        if c.is_empty() || g.closed_neighborhood(&c).len() == n {
            continue;
        }
        let cfg = MinNnccConfig::default();
        let seed = checked as u64;
        let via = min_nncc_via_embedding(&g, &c, 2, &cfg, seed, field()).unwrap();
        assert_eq!(via, min_nncc(&g, &c, 2, &cfg, seed).unwrap().objective);
        checked += 1;
    }
}
