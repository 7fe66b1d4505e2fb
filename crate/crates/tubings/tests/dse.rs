mod common;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use tubings::dse::*;
use tubings::scalar::{int, rat};
use tubings::trees::{enumerate_rooted_trees, TreeDomain, TypeTag};
use tubings::tubings::enumerate_tubings;
use tubings::{Decoration, FlatTree, LPoly, MellinTable, Poly, Rational};

use common::*;

fn kernels(ws: &[u32]) -> Vec<Decoration> {
    ws.iter().map(|&w| Decoration::weight(w)).collect()
}

fn s_values() -> Vec<Rational> {
    vec![int(-3), int(-2), int(-1), int(0), rat(1, 2), int(2)]
}

#[test]
fn all_solvers_agree_symbolically() {
    for ws in [vec![1u32], vec![1, 2]] {
        let table = MellinTable::symbolic(kernels(&ws), 5);
        for s in s_values() {
            let spec = SingleSpec::new(s.clone(), table.clone(), 5);
            let g = solve_tubing(&spec).unwrap();
            assert!(g.check_invariants());
            assert_eq!(g, solve_tubing_plane(&spec).unwrap(), "plane, s = {s}");
            assert_eq!(g, solve_fixed_point(&spec).unwrap(), "fixed point, s = {s}");
            assert_eq!(g, solve_exp_star(&spec).unwrap(), "exp, s = {s}");
            assert!(rge_check(&g, &s), "rge, s = {s}");
            if s.is_zero() && ws.len() == 1 {
                assert_eq!(
                    anomalous_dimension(&g),
                    linear_dse_coeffs(&table, Decoration::default(), 5).unwrap()
                );
            }
        }
    }
}

#[test]
fn yukawa_anomalous_dimension_is_catalan() {
    let g = solve_tubing(&SingleSpec::new(int(0), MellinTable::yukawa(10), 10)).unwrap();
    let want: Vec<Rational> = (1..=10)
        .map(|n| -Rational::from_integer((catalan(n - 1) as i64).into()))
        .collect();
    assert_eq!(anomalous_dimension(&g), want);
    for k in 1..=10 {
        let mut pow = vec![Rational::zero(); 11];
        pow[0] = Rational::one();
        for _ in 0..k {
            let mut next = vec![Rational::zero(); 11];
            for i in 0..=10 {
                for j in 1..=10 - i {
                    next[i + j] += &pow[i] * &want[j - 1];
                }
            }
            pow = next;
        }
        let kf: Rational = (1..=k as i64).map(int).product();
        let got = g.gamma_k(k);
        for n in 1..=10 {
            assert_eq!(got[n - 1], &pow[n] / &kf, "k = {k}, n = {n}");
        }
    }
}

#[test]
fn every_yukawa_tubing_contributes_minus_one() {
    let table = MellinTable::yukawa(8);
    for n in 1..=6 {
        for t in enumerate_rooted_trees(n, &TreeDomain::Unweighted) {
            let host = FlatTree::new(&t.to_plane()).unwrap();
            for tau in enumerate_tubings(&host) {
                assert_eq!(tubing_feynman_rules(&tau, &host, &table).unwrap().coeff(1), int(-1));
            }
        }
    }
}

#[test]
fn yukawa_rge_for_negative_s() {
    let g = solve_tubing(&SingleSpec::new(int(-2), MellinTable::yukawa(6), 6)).unwrap();
    assert!(rge_check(&g, &int(-2)));
    assert!(!rge_check(&g, &int(1)));
}

#[test]
fn high_out_degree_vanishes_for_integer_s() {
    for s in [-1i64, 0, 1, 2] {
        for n in 1..=6 {
            for t in enumerate_rooted_trees(n, &TreeDomain::Unweighted) {
                fn max_od(t: &tubings::RootedTree) -> usize {
                    t.children()
                        .iter()
                        .map(max_od)
                        .max()
                        .unwrap_or(0)
                        .max(t.children().len())
                }
                if max_od(&t) as i64 > s + 1 {
                    assert!(tree_prefactor(&t, &int(s)).is_zero(), "{t} s = {s}");
                }
            }
        }
    }
}

#[test]
fn first_order_is_the_simple_pole() {
    let table = MellinTable::symbolic(kernels(&[1, 2]), 4);
    let g = solve_fixed_point(&SingleSpec::new(rat(-1, 3), table, 4)).unwrap();
    let c0 = |w| Poly::mellin(0, TypeTag::default(), w);
    assert_eq!(g.coeff(1), &LPoly::monomial(c0(1), 1));
    assert_eq!(g.coeff(2).coeff(1).coeff(&Default::default()), Rational::zero());
    assert!(g.coeff(2).coeff(1).terms().any(|(m, _)| m.to_string() == "c0_2"));
}

fn two_type_table(len: usize) -> (TypeTag, TypeTag, MellinTable<Poly>) {
    let a = TypeTag::new("a").unwrap();
    let b = TypeTag::new("b").unwrap();
    let decos = [Decoration::new(a, 1), Decoration::new(a, 2), Decoration::new(b, 1)];
    (a, b, MellinTable::symbolic(decos, len))
}

#[test]
fn system_matches_its_fixed_point() {
    let (a, b, table) = two_type_table(4);
    for (sa, sb) in [(int(-2), int(-1)), (rat(1, 2), int(1)), (int(0), int(-3))] {
        let spec = SystemSpec {
            s: [(a, sa), (b, sb)].into(),
            mellin: table.clone(),
            order: 4,
        };
        let sol = solve_system(&spec).unwrap();
        assert_eq!(sol, solve_fixed_point_system(&spec).unwrap());
        for g in sol.values() {
            assert!(g.check_invariants());
        }
        let c0 = |t| Poly::mellin(0, t, 1);
        assert_eq!(sol[&a].coeff(1), &LPoly::monomial(c0(a), 1));
        assert_eq!(sol[&b].coeff(1), &LPoly::monomial(c0(b), 1));
    }
}

#[test]
fn one_type_system_is_the_single_equation() {
    for ws in [vec![1u32], vec![1, 2]] {
        let table = MellinTable::symbolic(kernels(&ws), 5);
        for s in s_values() {
            let spec = SingleSpec::new(s, table.clone(), 5);
            let single = solve_tubing(&spec).unwrap();
            let sys = solve_system(&spec.as_system()).unwrap();
            assert_eq!(sys.len(), 1);
            assert_eq!(sys.values().next().unwrap(), &single);
        }
    }
}

#[test]
fn invalid_equation_errors() {
    let (a, _, table) = two_type_table(4);
    assert!(matches!(
        solve_tubing(&SingleSpec::new(int(0), table.clone(), 3)),
        Err(DseError::Spec(_))
    ));
    let spec = SystemSpec {
        s: BTreeMap::from([(a, int(0))]),
        mellin: table,
        order: 3,
    };
    assert!(matches!(solve_system(&spec), Err(DseError::Spec(_))));
}

#[test]
fn green_series_json_round_numbers() {
    let g = solve_tubing(&SingleSpec::new(int(1), MellinTable::yukawa(3), 3)).unwrap();
    let j = g.to_json();
    assert_eq!(j["order"], 3);
    assert_eq!(j["terms"].as_array().unwrap().len(), 3);
    assert_eq!(j["terms"][2]["n"], 3);
}
