mod common;

use proptest::prelude::*;
use vcframe::graph::{neighborhood_difference, parse_edge_list, to_edge_list, validate_cut, CutKind, InvalidCut};
use vcframe::oracle::{brute_force_vc, BRUTE_FORCE_LIMIT};
use vcframe::{Error, Graph, VertexCut};

fn star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).unwrap()
}

#[test]
fn loading_examples() {
    let p3 = parse_edge_list("p 3 2\n0 1\n1 2").unwrap();
    assert_eq!((p3.n(), p3.m()), (3, 2));
    let single = parse_edge_list("0 1\n1 0").unwrap();
    assert_eq!(single.m(), 1);
    assert!(matches!(parse_edge_list("0 0"), Err(Error::SelfLoop { line: 1, v: 0 })));
    assert!(matches!(parse_edge_list("0 1\nx 2\n"), Err(Error::Format { line: 2, .. })));
}

#[test]
fn min_degree_examples() {
    assert_eq!(star(4).min_degree(), Some((1, 1)));
    assert_eq!(common::complete(4).min_degree(), Some((0, 3)));
    assert_eq!(parse_edge_list("0 1\n1 2").unwrap().min_degree(), Some((0, 1)));
}

#[test]
fn degenerate_cut_on_clique_validates() {
    let k4 = common::complete(4);
    for t in 0..4 {
        assert_eq!(validate_cut(&k4, &VertexCut::degenerate_for_sink(4, t)), Ok(true));
    }
}

#[test]
fn structural_problems_are_reported() {
    let p3 = parse_edge_list("0 1\n1 2").unwrap();
    let overlap = VertexCut { kind: CutKind::Proper, left: vec![0], separator: vec![0, 1], right: vec![2], size: 2 };
    assert!(validate_cut(&p3, &overlap).is_err());
    let missing = VertexCut { kind: CutKind::Proper, left: vec![0], separator: vec![], right: vec![2], size: 0 };
    assert!(matches!(validate_cut(&p3, &missing), Err(InvalidCut::Missing(1))));
}

#[test]
fn minimum_cut_sides_have_small_neighborhood_difference() {
    for g in common::connected_graphs_up_to(6) {
        let ans = brute_force_vc(&g, BRUTE_FORCE_LIMIT).unwrap();
        if ans.witness.kind != CutKind::Proper {
            continue;
        }
        let l = &ans.witness.left;
        for &u in l {
            for &v in l {
                if u < v {
                    assert!(neighborhood_difference(&g, u, v).unwrap() <= 2 * l.len());
                }
            }
        }
    }
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..(n * n / 2 + 1)).prop_map(move |pairs| {
            Graph::from_edges(n, pairs.into_iter().filter(|(a, b)| a != b)).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn parsed_graphs_are_symmetric(g in arb_graph(12)) {
        let h = parse_edge_list(&to_edge_list(&g)).unwrap();
        prop_assert_eq!(&h, &g);
        for u in 0..h.n() {
            prop_assert!(h.neighbors(u).windows(2).all(|w| w[0] < w[1]));
            prop_assert!(!h.has_edge(u, u));
            for &v in h.neighbors(u) {
                prop_assert!(h.has_edge(v, u));
            }
        }
    }

    #[test]
    fn difference_matches_counting_identity(g in arb_graph(12)) {
        for u in 0..g.n() {
            for v in u + 1..g.n() {
                let common = g.neighbors(u).iter().filter(|x| g.neighbors(v).contains(x)).count();
                prop_assert_eq!(
                    neighborhood_difference(&g, u, v).unwrap(),
                    g.degree(u) + g.degree(v) - 2 * common
                );
            }
        }
    }

    #[test]
    fn valid_cuts_are_never_below_kappa(g in arb_graph(10), mask in any::<u16>()) {
        if g.n() < 2 {
            return Ok(());
        }
        let kappa = brute_force_vc(&g, BRUTE_FORCE_LIMIT).unwrap().kappa;
        let left: Vec<usize> = (0..g.n()).filter(|&v| mask >> v & 1 == 1).collect();
        if left.is_empty() {
            return Ok(());
        }
        let cut = VertexCut::from_left(&g, &left);
        if validate_cut(&g, &cut) == Ok(true) {
            prop_assert!(cut.size >= kappa);
        }
    }
}
