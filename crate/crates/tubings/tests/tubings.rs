mod common;

use std::collections::BTreeSet;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tubings::trees::{enumerate_rooted_trees, parse_tree, TreeDomain};
use tubings::tubings::*;
use tubings::{Decoration, FlatTree, MellinTable, PlaneTree, Poly, Tubing};

use common::*;

fn factorial(n: u64) -> BigUint {
    (1..=n).product()
}

fn is_connected_in(host: &FlatTree, tube: u64) -> bool {
    let top = tube.trailing_zeros() as usize;
    (0..host.len())
        .filter(|&v| v != top && tube >> v & 1 == 1)
        .all(|v| tube >> host.parent[v].unwrap() & 1 == 1)
}

#[test]
fn ladder_and_corolla_counts() {
    for n in 0..=12 {
        assert_eq!(
            count_tubings(&PlaneTree::ladder(n + 1).canonicalize()),
            catalan(n).into()
        );
    }
    for n in 0..=9 {
        assert_eq!(
            count_tubings(&PlaneTree::corolla(n + 1).canonicalize()),
            factorial(n as u64)
        );
    }
}

#[test]
fn five_vertex_unrooted_trees() {
    // A path with two leaves hung on one end.
    let fork = parse_tree("1(1(1(1),1))").unwrap();
    assert_eq!(count_tubings(&fork.canonicalize()), 18u32.into());
    assert_eq!(count_tubings(&PlaneTree::ladder(5).canonicalize()), 14u32.into());
    assert_eq!(count_tubings(&PlaneTree::corolla(5).canonicalize()), 24u32.into());
}

#[test]
fn count_is_invariant_under_rerooting() {
    for n in 1..=7 {
        for t in enumerate_rooted_trees(n, &TreeDomain::Unweighted) {
            let flat = FlatTree::new(&t.to_plane()).unwrap();
            let base = count_tubings(&t);
            for v in 0..flat.len() {
                assert_eq!(count_tubings(&flat.rerooted(v).canonicalize()), base, "{t} at {v}");
            }
        }
    }
}

#[test]
fn counting_bounds() {
    for n in 1..=9u64 {
        for t in enumerate_rooted_trees(n, &TreeDomain::Unweighted) {
            let c = count_tubings(&t);
            assert!(c >= catalan(n as usize - 1).into() && c <= factorial(n - 1), "{t}");
        }
    }
}

#[test]
fn structure_of_every_tubing() {
    for n in 1..=8 {
        for t in enumerate_rooted_trees(n, &TreeDomain::Unweighted) {
            let plane = t.to_plane();
            let host = FlatTree::new(&plane).unwrap();
            let all = enumerate_tubings(&host);
            assert_eq!(BigUint::from(all.len()), count_tubings(&t));
            assert_eq!(all.len(), enumerate_plane_tubings(&plane).len());
            let distinct: BTreeSet<&Tubing> = all.iter().collect();
            assert_eq!(distinct.len(), all.len());
            for tau in &all {
                let tubes = tau.tubes();
                assert_eq!(tubes.len(), 2 * n as usize - 1);
                assert!(tubes.iter().all(|&tb| is_connected_in(&host, tb)));
                assert_eq!(tau.b_stats().iter().sum::<usize>(), 2 * n as usize - 1);
                if let Tubing::Split { upper, .. } = tau {
                    assert_eq!(tau.b(), upper.b() + 1);
                }
            }
        }
    }
}

#[test]
fn leaf_tubings_are_counted_by_decreasing_labellings() {
    for n in 1..=7 {
        for t in enumerate_rooted_trees(n, &TreeDomain::Unweighted) {
            let host = FlatTree::new(&t.to_plane()).unwrap();
            let leaf = enumerate_tubings(&host)
                .iter()
                .filter(|tau| tau.is_leaf_tubing())
                .count();
            assert_eq!(BigUint::from(leaf), t.decreasing_labellings(), "{t}");
        }
    }
}

#[test]
fn ladder_containment_trees_are_all_binary_trees() {
    let host = FlatTree::new(&PlaneTree::ladder(5)).unwrap();
    let shapes: BTreeSet<_> = enumerate_tubings(&host)
        .iter()
        .map(|t| t.containment_tree().shape())
        .collect();
    assert_eq!(shapes.len(), 14);
    assert_eq!(shapes, binary_shapes(5).into_iter().collect());
}

#[test]
fn truncated_table_is_an_error() {
    let table = MellinTable::symbolic([Decoration::default()], 2);
    let host = FlatTree::new(&PlaneTree::ladder(3)).unwrap();
    let nested = &enumerate_tubings(&host)[1];
    assert!(mellin_monomial(nested, &host, &table).is_ok());
    let l4 = FlatTree::new(&PlaneTree::ladder(4)).unwrap();
    assert!(enumerate_tubings(&l4)
        .iter()
        .any(|t| mellin_monomial(t, &l4, &table).is_err()));
}

proptest! {
    #[test]
    fn monomial_split_recursion(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_plane_tree(n, &[1, 2], &mut rng);
        let host = FlatTree::new(&t).unwrap();
        let tau = random_tubing(&host, &mut rng);
        let table = MellinTable::symbolic([Decoration::weight(1), Decoration::weight(2)], n);
        let a: Poly = mellin_monomial(&tau, &host, &table).unwrap();
        prop_assert_eq!(a, mellin_monomial_recursive(&tau, &host, &table).unwrap());
    }

    #[test]
    fn tube_sets_determine_tubings(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_plane_tree(n, &[1], &mut rng);
        let host = FlatTree::new(&t).unwrap();
        let tau = random_tubing(&host, &mut rng);
        tau.validate(&host).unwrap();
        prop_assert_eq!(Tubing::from_tubes(&host, &tau.tubes()).unwrap(), tau.clone());
        prop_assert_eq!(Tubing::from_json(&tau.to_json()).unwrap(), tau);
    }

    #[test]
    fn profile_sums_monomials(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_plane_tree(n, &[1, 2], &mut rng);
        let host = FlatTree::new(&t).unwrap();
        let table = MellinTable::symbolic([Decoration::weight(1), Decoration::weight(2)], n + 1);
        let prof = tubing_profile(&host, &table).unwrap();
        let mut want = vec![Poly::default(); prof.len()];
        for tau in enumerate_tubings(&host) {
            want[tau.b()] += &mellin_monomial(&tau, &host, &table).unwrap();
        }
        prop_assert_eq!(prof, want);
    }
}
