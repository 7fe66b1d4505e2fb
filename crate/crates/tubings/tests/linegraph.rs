#![allow(clippy::needless_range_loop)]
use std::collections::BTreeSet;

use proptest::prelude::*;
use tubings::linegraph::*;
use tubings::trees::{enumerate_plane_trees, TreeDomain};
use tubings::tubings::{count_tubings, enumerate_tubings};
use tubings::{FlatTree, PlaneTree};

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

#[test]
fn l_is_a_bijection_for_all_small_trees() {
    for n in 1..=6 {
        for t in enumerate_plane_trees(n as u64, &TreeDomain::Unweighted) {
            let host = FlatTree::new(&t).unwrap();
            let g = line_graph(&t).unwrap();
            assert_eq!(g.n(), n - 1);
            let tubings = enumerate_tubings(&host);
            let images: BTreeSet<ATubing> = tubings.iter().map(l_map).collect();
            let maximal: BTreeSet<ATubing> = maximal_atubings(&g).unwrap().into_iter().collect();
            assert_eq!(images, maximal, "{t}");
            assert_eq!(images.len(), tubings.len());
            assert_eq!(count_tubings(&t.canonicalize()), (maximal.len() as u64).into());
            for tau in &tubings {
                let a = l_map(tau);
                assert_eq!(a.len(), n.saturating_sub(2));
                assert!(is_maximal_atubing(&g, a.tubes()));
                assert_eq!(&l_inverse(&t, &a).unwrap(), tau);
            }
            for a in &maximal {
                assert_eq!(&l_map(&l_inverse(&t, a).unwrap()), a);
            }
        }
    }
}

#[test]
fn complete_graphs_and_corollas() {
    for k in 1..=5 {
        assert_eq!(
            line_graph(&PlaneTree::corolla(k + 1)).unwrap(),
            SimpleGraph::complete(k)
        );
        assert_eq!(maximal_atubings(&SimpleGraph::complete(k)).unwrap().len(), factorial(k));
    }
}

#[test]
fn ladders_give_catalan_counts() {
    let catalan = [1, 1, 2, 5, 14, 42, 132, 429];
    for n in 1..=7 {
        assert_eq!(line_graph(&PlaneTree::ladder(n + 1)).unwrap(), SimpleGraph::path(n));
        assert_eq!(maximal_atubings(&SimpleGraph::path(n)).unwrap().len(), catalan[n]);
    }
}

proptest! {
    #[test]
    fn maximal_tubings_are_maximal(n in 1usize..=6, extra in proptest::collection::vec((0usize..6, 0usize..6), 0..6)) {
        let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
        edges.extend(extra.into_iter().filter(|&(u, v)| u < n && v < n && u != v));
        let g = SimpleGraph::new(n, &edges).unwrap();
        for a in maximal_atubings(&g).unwrap() {
            prop_assert!(is_maximal_atubing(&g, a.tubes()));
            prop_assert_eq!(a.len(), n.saturating_sub(1));
        }
    }
}
