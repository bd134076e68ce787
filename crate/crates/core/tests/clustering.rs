mod common;

use vcframe::clustering::{check_cover_properties, com_nei_clustering, max_pairwise_difference, ClusterConfig};
use vcframe::Graph;

fn two_k5_with_bridge() -> Graph {
    let mut edges = Vec::new();
    for base in [0, 5] {
        for a in 0..5 {
            for b in a + 1..5 {
                edges.push((base + a, base + b));
            }
        }
    }
    edges.push((4, 5));
    Graph::from_edges(10, edges).unwrap()
}

#[test]
fn k5_pair_is_covered() {
    let g = two_k5_with_bridge();
    let cover = com_nei_clustering(&g, 1, &ClusterConfig::default(), 4).unwrap();
    for l in [[0, 1, 2, 3, 4], [5, 6, 7, 8, 9]] {
        assert!(cover.covers(&l));
        assert!(max_pairwise_difference(&g, &l) <= 3);
    }
}

#[test]
fn clique_clusters_have_small_spread() {
    let g = common::complete(9);
    let cover = com_nei_clustering(&g, 3, &ClusterConfig { boost: Some(1), ..Default::default() }, 0).unwrap();
    assert!(!cover.clusters.is_empty());
    for c in &cover.clusters {
        assert!(max_pairwise_difference(&g, &c.vertices) <= 2);
    }
}

#[test]
fn empty_set_fails_precondition() {
    let g = Graph::new(4);
    let cover = com_nei_clustering(&g, 1, &ClusterConfig::default(), 1).unwrap();
    assert!(!check_cover_properties(&g, &cover, &[]).precondition);
    let rep = check_cover_properties(&g, &cover, &[0]);
    assert!(rep.precondition && rep.covered);
    assert!(rep.max_multiplicity >= 1 && rep.max_multiplicity <= cover.schedule.iterations());
}

#[test]
fn structural_guarantees_on_random_graphs() {
    let mut r = common::rng(61);
    for (k, &(n, p, ell)) in [(30, 0.2, 2), (60, 0.1, 3), (80, 0.3, 5), (120, 0.05, 1)].iter().enumerate() {
        let g = common::gnp(n, p, &mut r);
        let cover = com_nei_clustering(&g, ell, &ClusterConfig::default(), k as u64).unwrap();
        let rep = check_cover_properties(&g, &cover, &[0]);
        assert!(rep.disjoint_within_iteration);
        assert!(rep.max_multiplicity <= cover.schedule.iterations());
        assert_eq!(rep.over_cap, 0);
        for c in &cover.clusters {
            assert!(!c.vertices.is_empty());
            assert!(c.vertices.windows(2).all(|w| w[0] < w[1]) && *c.vertices.last().unwrap() < n);
        }
    }
}
