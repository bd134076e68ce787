#![allow(dead_code)]

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vcframe::Graph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gnp(n: usize, p: f64, r: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn connected_gnp(n: usize, p: f64, r: &mut ChaCha8Rng) -> Graph {
    loop {
        let g = gnp(n, p, r);
        if g.is_connected() {
            return g;
        }
    }
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

pub fn petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    Graph::from_edges(10, outer.chain(spokes).chain(inner)).unwrap()
}

fn adjacency_bits(n: usize, adj: &[u8]) -> u32 {
    // Upper triangle in row order, one bit per pair.
    let mut code = 0u32;
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            if adj[u] >> v & 1 == 1 {
                code |= 1 << bit;
            }
            bit += 1;
        }
    }
    code
}

/// Canonical code: the smallest upper-triangle code over relabelings that
/// list vertices by nondecreasing degree.
fn canonical(n: usize, adj: &[u8]) -> u32 {
    let deg: Vec<u32> = adj.iter().map(|a| a.count_ones()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| deg[v]);
    let mut best = u32::MAX;
    let mut perm = order.clone();
    permute_within_classes(&mut perm, 0, &deg, &mut |p| {
        let mut pos = [0usize; 8];
        for (i, &v) in p.iter().enumerate() {
            pos[v] = i;
        }
        let mut relabeled = [0u8; 8];
        for u in 0..n {
            for v in 0..n {
                if adj[u] >> v & 1 == 1 {
                    relabeled[pos[u]] |= 1 << pos[v];
                }
            }
        }
        best = best.min(adjacency_bits(n, &relabeled[..n]));
    });
    best
}

fn permute_within_classes(p: &mut Vec<usize>, k: usize, deg: &[u32], f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        if deg[p[i]] != deg[p[k]] {
            break;
        }
        p.swap(k, i);
        permute_within_classes(p, k + 1, deg, f);
        p.swap(k, i);
    }
}

/// All graphs on `n ≤ 7` vertices up to isomorphism (as adjacency rows).
fn all_graphs(n: usize) -> Vec<Vec<u8>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for g in all_graphs(n - 1) {
        for mask in 0u8..(1 << (n - 1)) {
            let mut adj = g.clone();
            adj.push(mask);
            for v in 0..n - 1 {
                if mask >> v & 1 == 1 {
                    adj[v] |= 1 << (n - 1);
                }
            }
            if seen.insert(canonical(n, &adj)) {
                out.push(adj);
            }
        }
    }
    out
}

/// Every connected graph with `2 ≤ n ≤ max_n` vertices, up to isomorphism.
pub fn connected_graphs_up_to(max_n: usize) -> Vec<Graph> {
    assert!(max_n <= 7);
    let mut out = Vec::new();
    for n in 2..=max_n {
        for adj in all_graphs(n) {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if adj[u] >> v & 1 == 1 {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, edges).unwrap();
            if g.is_connected() {
                out.push(g);
            }
        }
    }
    out
}

/// The 500 random graphs of the acceptance corpus: `8 ≤ n ≤ 14`, mixed density.
pub fn random_corpus(count: usize, seed: u64) -> Vec<Graph> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.gen_range(8..=14);
            let p = r.gen_range(0.2..0.8);
            gnp(n, p, &mut r)
        })
        .collect()
}
