mod common;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tubings::trees::*;

use common::*;

/// All permutations of 0..n.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Unlabelled rooted trees: a(n+1) = (1/n) Σ_{k=1}^{n} (Σ_{d|k} d a(d)) a(n-k+1).
fn rooted_tree_counts(max: usize) -> Vec<u64> {
    let mut a = vec![0u64, 1];
    for n in 1..max {
        let mut s = 0;
        for k in 1..=n {
            let inner: u64 = (1..=k).filter(|d| k % d == 0).map(|d| d as u64 * a[d]).sum();
            s += inner * a[n - k + 1];
        }
        a.push(s / n as u64);
    }
    a
}

fn out_degree_factorials(t: &PlaneTree) -> BigUint {
    let mut acc: BigUint = (1..=t.children.len() as u64).product();
    for c in &t.children {
        acc *= out_degree_factorials(c);
    }
    acc
}

fn brute_decreasing(t: &PlaneTree) -> u64 {
    let flat = FlatTree::new(t).unwrap();
    permutations(flat.len())
        .iter()
        .filter(|lab| (1..flat.len()).all(|v| lab[v] < lab[flat.parent[v].unwrap()]))
        .count() as u64
}

#[test]
fn plane_and_rooted_counts() {
    let rooted = rooted_tree_counts(10);
    for (n, &want) in rooted.iter().enumerate().take(11).skip(1) {
        let plane = enumerate_plane_trees(n as u64, &TreeDomain::Unweighted);
        assert_eq!(plane.len() as u64, catalan(n - 1));
        let trees = enumerate_rooted_trees(n as u64, &TreeDomain::Unweighted);
        assert_eq!(trees.len() as u64, want, "n = {n}");
    }
}

#[test]
fn embeddings_times_automorphisms() {
    for n in 1..=8 {
        for t in enumerate_rooted_trees(n, &TreeDomain::Unweighted) {
            assert_eq!(
                t.plane_embeddings() * t.aut_order(),
                out_degree_factorials(&t.to_plane()),
                "{t}"
            );
        }
    }
}

#[test]
fn plane_trees_cover_rooted_trees_once_per_embedding() {
    for n in 1..=7 {
        let mut seen: BTreeMap<RootedTree, u64> = BTreeMap::new();
        for p in enumerate_plane_trees(n, &TreeDomain::Unweighted) {
            let c = p.canonicalize();
            assert_eq!(c.to_plane().canonicalize(), c);
            *seen.entry(c).or_default() += 1;
        }
        let trees = enumerate_rooted_trees(n, &TreeDomain::Unweighted);
        assert_eq!(seen.len(), trees.len());
        for t in trees {
            assert_eq!(BigUint::from(seen[&t]), t.plane_embeddings());
        }
    }
}

#[test]
fn decreasing_labellings_match_brute_force() {
    for n in 1..=6 {
        let mut total = BigUint::from(0u32);
        for t in enumerate_rooted_trees(n, &TreeDomain::Unweighted) {
            let d = t.decreasing_labellings();
            assert_eq!(d, brute_decreasing(&t.to_plane()).into());
            total += d * t.plane_embeddings();
        }
        assert_eq!(total, decreasing_plane_trees(n as usize).into());
    }
}

#[test]
fn weighted_enumeration() {
    let d = TreeDomain::AnyWeight(vec![TypeTag::default()]);
    let ts: Vec<String> = enumerate_rooted_trees(2, &d).iter().map(ToString::to_string).collect();
    assert_eq!(ts, vec!["1(1)", "2"]);
    for w in 1..=6 {
        for t in enumerate_plane_trees(w, &d) {
            assert_eq!(t.weight(), w);
        }
    }
    let a = TypeTag::new("a").unwrap();
    let b = TypeTag::new("b").unwrap();
    let two = enumerate_rooted_trees(
        2,
        &TreeDomain::Decorations(vec![Decoration::new(a, 1), Decoration::new(b, 1)]),
    );
    assert_eq!(two.len(), 4);
}

#[test]
fn rerooting_keeps_vertex_count_and_weight() {
    let t = parse_tree("1(2(1,3),1(1))").unwrap();
    let flat = FlatTree::new(&t).unwrap();
    for v in 0..flat.len() {
        let r = flat.rerooted(v);
        assert_eq!(r.size(), t.size());
        assert_eq!(r.weight(), t.weight());
        assert_eq!(r.deco, flat.deco[v]);
    }
}

#[test]
fn errors_are_reported() {
    assert!(matches!(parse_tree("1(1,"), Err(TreeError::Syntax { .. })));
    assert!(matches!(parse_tree("0"), Err(TreeError::ZeroWeight { .. })));
    assert!(parse_tree("1(1)x").is_err());
    assert!(parse_tree("").is_err());
    assert!(matches!(
        PlaneTree::ladder(3).edge_split(3),
        Err(TreeError::BadEdge { .. })
    ));
    assert!(FlatTree::new(&PlaneTree::ladder(65)).is_err());
}

proptest! {
    #[test]
    fn text_and_json_round_trip(seed in any::<u64>(), n in 1usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_plane_tree(n, &[1, 2, 5], &mut rng);
        prop_assert_eq!(parse_tree(&t.to_string()).unwrap(), t.clone());
        prop_assert_eq!(PlaneTree::from_json(&t.to_json()).unwrap(), t.clone());
        let c = t.canonicalize();
        prop_assert_eq!(c.to_plane().canonicalize(), c.clone());
        prop_assert_eq!(c.size(), n);
    }

    #[test]
    fn edge_split_partitions(seed in any::<u64>(), n in 2usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_plane_tree(n, &[1, 3], &mut rng);
        for e in 1..n {
            let (lower, upper) = t.edge_split(e).unwrap();
            prop_assert_eq!(lower.size() + upper.size(), n);
            prop_assert_eq!(lower.weight() + upper.weight(), t.weight());
            prop_assert_eq!(upper.deco, t.deco);
        }
    }
}
