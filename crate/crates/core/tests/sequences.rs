mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use elimdist::graph::Graph;
use elimdist::orders::TreeOrder;
use elimdist::sequences::{
    satisfies, search_witness, verify_witness, validate_sequence, KdSequence, PortMap,
};
use elimdist::oracle::OracleConfig;

#[test]
fn worked_orders_as_witnesses() {
    let pc = common::fig_component();
    let v = |s: &KdSequence, o: &TreeOrder| verify_witness(&pc.graph, &pc.ports, s, 2, o).unwrap();
    assert!(v(&common::s1(), &common::order_one()).is_empty());
    assert!(!v(&common::s2(), &common::order_two()).is_empty());
    assert!(v(&common::s3(), &common::order_two()).is_empty());
    // Order 1 is too deep for the three-level sequences.
    assert!(!v(&common::s3(), &common::order_one()).is_empty());
}

#[test]
fn found_witnesses_verify() {
    let pc = common::fig_component();
    for s in [common::s1(), common::s3()] {
        let o = search_witness(&pc.graph, &pc.ports, &s, 2, 1_000_000).unwrap().unwrap();
        assert!(verify_witness(&pc.graph, &pc.ports, &s, 2, &o).unwrap().is_empty());
    }
}

#[test]
fn worked_sequences_are_well_formed() {
    for s in [common::s1(), common::s2(), common::s3()] {
        assert!(validate_sequence(&s, 5).valid);
    }
}

/// Every rooted forest on `0..n`, by decoding each parent array in base
/// `n + 1` (digit `n` marks a root).
fn all_forests(n: usize) -> Vec<TreeOrder> {
    let mut out = Vec::new();
    for code in 0..(n + 1).pow(n as u32) {
        let mut x = code;
        let parent: Vec<usize> = (0..n)
            .map(|_| {
                let p = x % (n + 1);
                x /= n + 1;
                p
            })
            .collect();
        let acyclic = (0..n).all(|v| {
            let mut cur = v;
            for _ in 0..=n {
                if parent[cur] == n {
                    return true;
                }
                cur = parent[cur];
            }
            false
        });
        if acyclic {
            out.push(TreeOrder::from_parents(
                (0..n).map(|v| (v, (parent[v] < n).then_some(parent[v]))),
            ));
        }
    }
    out
}

#[test]
fn forest_enumeration_counts() {
    // Rooted labelled forests on n vertices: (n + 1)^(n - 1).
    for (n, want) in [(1, 1), (2, 3), (3, 16), (4, 125)] {
        assert_eq!(all_forests(n).len(), want, "n = {n}");
    }
}

fn arb_instance() -> impl Strategy<Value = (Graph, PortMap, KdSequence, usize)> {
    (1usize..=5, proptest::collection::vec((0usize..5, 0usize..5), 0..8), 0usize..=2)
        .prop_flat_map(|(n, edges, d)| {
            let edges: Vec<_> = edges.into_iter().filter(|&(u, v)| u < n && v < n && u != v).collect();
            let g = Graph::from_edges(n, edges).unwrap();
            let p = 2usize;
            let pool = common::all_sequences(p, 2);
            let ports = proptest::collection::vec(proptest::option::of(1usize..=p), n);
            (Just(g), ports, proptest::sample::select(pool), Just(d))
        })
        .prop_map(|(g, ports, s, d)| {
            let pm: PortMap = ports
                .into_iter()
                .enumerate()
                .filter_map(|(v, j)| j.map(|j| (v, BTreeSet::from([j]))))
                .collect();
            (g, pm, s, d)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    /// The canonical search finds a witness exactly when some forest is one.
    #[test]
    fn search_is_complete_against_all_forests((g, ports, s, d) in arb_instance()) {
        let brute = all_forests(g.capacity())
            .iter()
            .any(|o| verify_witness(&g, &ports, &s, d, o).unwrap().is_empty());
        let found = search_witness(&g, &ports, &s, d, 1_000_000).unwrap();
        prop_assert_eq!(found.is_some(), brute);
        if let Some(o) = found {
            prop_assert!(verify_witness(&g, &ports, &s, d, &o).unwrap().is_empty());
        }
    }

    #[test]
    fn satisfies_without_model_is_the_search((g, ports, s, d) in arb_instance()) {
        let a = satisfies(
            &elimdist::sequences::PortedComponent::new(g.clone(), ports.clone()).unwrap(),
            None,
            &s,
            2,
            d,
            &OracleConfig::default(),
        )
        .unwrap()
        .satisfied;
        let b = search_witness(&g, &ports, &s, d, 1_000_000).unwrap().is_some();
        prop_assert_eq!(a, b);
    }
}
