//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tubings::chords::*;
use tubings::dse::*;
use tubings::hopf::*;
use tubings::linegraph::*;
use tubings::scalar::{int, rat};
use tubings::trees::{enumerate_plane_trees, enumerate_rooted_trees, parse_tree, TreeDomain};
use tubings::tubings::{count_tubings, enumerate_tubings};
use tubings::{Decoration, FlatTree, LPoly, MellinTable, PlaneTree, Poly, Rational, RootedTree, TypeTag};

use common::*;

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn factorial(n: u64) -> BigUint {
    (1..=n).product()
}

fn unweighted(n: u64) -> Vec<RootedTree> {
    enumerate_rooted_trees(n, &TreeDomain::Unweighted)
}

fn kernels(ws: &[u32]) -> Vec<Decoration> {
    ws.iter().map(|&w| Decoration::weight(w)).collect()
}

fn counting_goldens() -> Check {
    for n in 0..=12 {
        let got = count_tubings(&PlaneTree::ladder(n + 1).canonicalize());
        ensure(got == catalan(n).into(), || {
            format!("ladder with {} vertices: {got}", n + 1)
        })?;
    }
    for n in 0..=9u64 {
        let got = count_tubings(&PlaneTree::corolla(n as usize + 1).canonicalize());
        ensure(got == factorial(n), || {
            format!("corolla with {} vertices: {got}", n + 1)
        })?;
    }
    let fork = parse_tree("1(1(1(1),1))").unwrap().canonicalize();
    ensure(count_tubings(&fork) == 18u32.into(), || "five-vertex fork".into())?;
    for n in 1..=8 {
        for t in unweighted(n) {
            let host = FlatTree::new(&t.to_plane()).unwrap();
            let all = enumerate_tubings(&host);
            ensure(BigUint::from(all.len()) == count_tubings(&t), || {
                format!("count mismatch on {t}")
            })?;
            for tau in all {
                ensure(tau.tubes().len() == 2 * n as usize - 1, || format!("{tau} on {t}"))?;
            }
        }
    }
    Ok(())
}

fn bounds() -> Check {
    for n in 1..=9u64 {
        for t in unweighted(n) {
            let c = count_tubings(&t);
            ensure(c >= catalan(n as usize - 1).into() && c <= factorial(n - 1), || {
                format!("{t}: {c}")
            })?;
        }
    }
    Ok(())
}

fn worked_examples() -> Check {
    let table = MellinTable::symbolic([Decoration::default()], 4);
    let c = |i| Poly::mellin(i, TypeTag::default(), 1);
    let amp = |s: &str| tree_amplitude(&FlatTree::new(&parse_tree(s).unwrap()).unwrap(), &table).unwrap();
    let lp = LPoly::new;
    let want = [
        ("1", lp(vec![Poly::zero(), c(0)])),
        (
            "1(1)",
            lp(vec![
                Poly::zero(),
                c(0) * &c(1),
                Poly::constant(rat(1, 2)) * &c(0) * &c(0),
            ]),
        ),
        (
            "1(1(1))",
            lp(vec![
                Poly::zero(),
                c(1) * &c(1) * &c(0) + c(2) * &c(0) * &c(0),
                c(1) * &c(0) * &c(0),
                Poly::constant(rat(1, 6)) * &c(0) * &c(0) * &c(0),
            ]),
        ),
        (
            "1(1,1)",
            lp(vec![
                Poly::zero(),
                Poly::constant(int(2)) * &c(2) * &c(0) * &c(0),
                c(0) * &c(0) * &c(1),
                Poly::constant(rat(1, 3)) * &c(0) * &c(0) * &c(0),
            ]),
        ),
    ];
    for (s, w) in want {
        let got = amp(s);
        ensure(got == w, || format!("{s}: got {got}"))?;
    }
    Ok(())
}

fn yukawa() -> Check {
    let g = solve_tubing(&SingleSpec::new(int(0), MellinTable::yukawa(10), 10)).map_err(|e| e.to_string())?;
    let gamma = anomalous_dimension(&g);
    // (sqrt(1-4x) - 1)/2 = -Σ C_{n-1} x^n
    for n in 1..=10 {
        let want = -Rational::from_integer((catalan(n - 1) as i64).into());
        ensure(gamma[n - 1] == want, || format!("[x^{n}]: {}", gamma[n - 1]))?;
    }
    let table = MellinTable::yukawa(8);
    for n in 1..=6 {
        for t in unweighted(n) {
            let host = FlatTree::new(&t.to_plane()).unwrap();
            for tau in enumerate_tubings(&host) {
                let l1 = tubing_feynman_rules(&tau, &host, &table).unwrap().coeff(1);
                ensure(l1 == int(-1), || format!("{tau} on {t}: {l1}"))?;
            }
        }
    }
    Ok(())
}

fn s_values() -> Vec<Rational> {
    vec![int(-3), int(-2), int(-1), int(0), rat(1, 2), int(2)]
}

fn solver_outputs() -> Result<Vec<(Rational, Vec<u32>, GreenSeries<Poly>)>, String> {
    let mut out = Vec::new();
    for ws in [vec![1u32], vec![1, 2]] {
        let table = MellinTable::symbolic(kernels(&ws), 5);
        for s in s_values() {
            for order in 1..=5 {
                let spec = SingleSpec::new(s.clone(), table.clone(), order);
                let g = solve_tubing(&spec).map_err(|e| e.to_string())?;
                out.push((s.clone(), ws.clone(), g));
            }
        }
    }
    Ok(out)
}

fn four_way() -> Check {
    for ws in [vec![1u32], vec![1, 2]] {
        let table = MellinTable::symbolic(kernels(&ws), 5);
        for s in s_values() {
            for order in 1..=5 {
                let spec = SingleSpec::new(s.clone(), table.clone(), order);
                let tag = || format!("s={s} kernels={ws:?} order={order}");
                let a = solve_tubing(&spec).map_err(|e| e.to_string())?;
                ensure(a == solve_tubing_plane(&spec).unwrap(), || {
                    format!("plane form, {}", tag())
                })?;
                ensure(a == solve_fixed_point(&spec).unwrap(), || {
                    format!("fixed point, {}", tag())
                })?;
                ensure(a == solve_exp_star(&spec).unwrap(), || format!("exp_*, {}", tag()))?;
                if s.is_zero() && ws.len() == 1 {
                    let lin = linear_dse_coeffs(&table, Decoration::default(), order).unwrap();
                    ensure(anomalous_dimension(&a) == lin, || format!("linear formula, {}", tag()))?;
                }
            }
        }
    }
    Ok(())
}

fn rge() -> Check {
    for (s, ws, g) in solver_outputs()? {
        ensure(rge_check(&g, &s), || {
            format!("s={s} kernels={ws:?} order={}", g.order())
        })?;
    }
    let g = solve_tubing(&SingleSpec::new(int(0), MellinTable::yukawa(8), 8)).unwrap();
    ensure(rge_check(&g, &int(0)), || "Yukawa s=0".into())
}

fn hopf_identities() -> Check {
    let decos = kernels(&[1, 2]);
    let table = MellinTable::symbolic(decos.clone(), 6);
    let domain = TreeDomain::Decorations(decos.clone());
    for f in enumerate_forests(5, &TreeDomain::Unweighted) {
        ensure(coassociative(&f) && counital(&f), || format!("Hopf axioms on {f:?}"))?;
    }
    for f in enumerate_forests(4, &domain) {
        for &d in &decos {
            ensure(bplus_cocycle_holds(&f, d), || format!("B+ cocycle on {f:?}"))?;
        }
    }
    let mut ev = SigmaEval::new(&table);
    let trees: Vec<RootedTree> = (1..=5).flat_map(|w| enumerate_rooted_trees(w, &domain)).collect();
    for a in trees.iter().filter(|t| t.weight() <= 4) {
        for b in trees.iter().filter(|t| t.weight() <= 4) {
            let ab = Forest::tree(a.clone()).mul(&Forest::tree(b.clone()));
            ensure(ev.sigma(&ab).unwrap().is_zero(), || format!("σ on product {a} {b}"))?;
        }
    }
    for t in &trees {
        let f = Forest::tree(t.clone());
        for k in 1..=t.size() {
            let lhs = ev.sigma_star(&f, k).unwrap();
            ensure(lhs == ev.sigma_star_formula(t, k).unwrap(), || format!("σ^*{k} on {t}"))?;
        }
        let host = FlatTree::new(&t.to_plane()).unwrap();
        ensure(
            ev.exp_star(&f).unwrap() == tree_amplitude(&host, &table).unwrap(),
            || format!("exp_* on {t}"),
        )?;
    }
    ensure(sigma_bplus_identity_check(&table, 4).unwrap(), || "σB+ identity".into())?;
    for k in 0..=5 {
        let p = LPoly::monomial(Poly::one(), k);
        ensure(lambda_cocycle_holds(Decoration::default(), &table, &p).unwrap(), || {
            format!("Λ cocycle on L^{k}")
        })?;
    }
    Ok(())
}

fn bijections() -> Check {
    let connected = connected_counts(5);
    for n in 1..=5 {
        let mut images = BTreeSet::new();
        for (t, tau) in tubed_plane_trees(n) {
            let img = theta(&t, &tau).map_err(|e| e.to_string())?;
            let (t2, tau2, vertex) = mu(&img.diagram).map_err(|e| e.to_string())?;
            ensure(t2 == t && tau2 == tau && vertex == img.vertex, || {
                format!("μθ on {t} {tau}")
            })?;
            ensure(terminal_correspondence_check(&t, &tau).unwrap(), || {
                format!("terminal chords of {t} {tau}")
            })?;
            let nus = nu(&img.diagram).unwrap();
            let flat = FlatTree::new(&t).unwrap();
            for (i, &v) in img.vertex.iter().enumerate() {
                ensure(nus[i] == flat.children[v].len(), || format!("ν on {}", img.diagram))?;
            }
            images.insert(img.diagram);
        }
        let all: BTreeSet<ChordDiagram> = enumerate_connected_diagrams(n).into_iter().collect();
        ensure(all.len() as u64 == connected[n], || format!("connected count at n={n}"))?;
        ensure(images == all, || format!("θ image at n={n}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    for i in 0..1000 {
        let n = 1 + i % 8;
        let t = random_plane_tree(n, &[1], &mut rng);
        let host = FlatTree::new(&t).unwrap();
        let tau = random_tubing(&host, &mut rng);
        let img = theta(&t, &tau).unwrap();
        let (t2, tau2, _) = mu(&img.diagram).unwrap();
        ensure(t2 == t && tau2 == tau, || format!("random μθ on {t} {tau}"))?;
        let c = random_connected_diagram(n, &mut rng);
        let (t, tau, _) = mu(&c).unwrap();
        ensure(theta(&t, &tau).unwrap().diagram == c, || format!("random θμ on {c}"))?;
    }
    Ok(())
}

fn expansion_agreement() -> Check {
    for ws in [vec![1u32], vec![1, 2]] {
        let table = MellinTable::symbolic(kernels(&ws), 4);
        let domain = TreeDomain::Decorations(kernels(&ws));
        for s in [int(-1), int(-2), int(-3)] {
            for order in 1..=4 {
                let chords = chord_expansion(&s, &table, order).map_err(|e| e.to_string())?;
                let trees = solve_tubing(&SingleSpec::new(s.clone(), table.clone(), order)).unwrap();
                ensure(chords == trees, || {
                    format!("series, s={s} kernels={ws:?} order={order}")
                })?;
            }
            let mut seen = BTreeSet::new();
            for w in 1..=4 {
                for t in enumerate_plane_trees(w, &domain) {
                    let host = FlatTree::new(&t).unwrap();
                    let pre = plane_prefactor(&t, &s);
                    for tau in enumerate_tubings(&host) {
                        let img = theta(&t, &tau).unwrap();
                        let lhs = diagram_term(&img.diagram, &s, &table).unwrap();
                        let rhs = tubing_feynman_rules(&tau, &host, &table).unwrap().scale(&pre);
                        ensure(lhs == rhs, || format!("term of {t} {tau}, s={s}"))?;
                        seen.insert(img.diagram);
                    }
                }
            }
            let all: BTreeSet<ChordDiagram> = enumerate_weighted_connected(4, &ws).into_iter().collect();
            ensure(seen == all, || format!("weighted θ image, kernels={ws:?}"))?;
        }
    }
    Ok(())
}

fn classes() -> Check {
    for n in 1..=6 {
        let r = special_class_check(n).map_err(|e| e.to_string())?;
        ensure(r.ladder_image_matches, || format!("ladder class at n={n}"))?;
        ensure(r.leaf_image_matches, || format!("leaf class at n={n}"))?;
        let df = decreasing_plane_trees(n);
        ensure(r.leaf_tubings as u64 == df && r.one_terminal as u64 == df, || {
            format!("{r:?}")
        })?;
    }
    for n in 1..=7 {
        for t in unweighted(n) {
            let host = FlatTree::new(&t.to_plane()).unwrap();
            let leaf = enumerate_tubings(&host)
                .iter()
                .filter(|tau| tau.is_leaf_tubing())
                .count();
            ensure(BigUint::from(leaf) == t.decreasing_labellings(), || {
                format!("leaf tubings of {t}")
            })?;
        }
    }
    Ok(())
}

fn systems() -> Check {
    let a = TypeTag::new("a").unwrap();
    let b = TypeTag::new("b").unwrap();
    let table = MellinTable::symbolic([Decoration::new(a, 1), Decoration::new(a, 2), Decoration::new(b, 1)], 4);
    for (sa, sb) in [(int(-2), int(-1)), (rat(1, 2), int(1)), (int(0), int(2))] {
        let spec = SystemSpec {
            s: [(a, sa.clone()), (b, sb.clone())].into(),
            mellin: table.clone(),
            order: 4,
        };
        let lhs = solve_system(&spec).map_err(|e| e.to_string())?;
        ensure(lhs == solve_fixed_point_system(&spec).unwrap(), || {
            format!("s=({sa},{sb})")
        })?;
    }
    for ws in [vec![1u32], vec![1, 2]] {
        let table = MellinTable::symbolic(kernels(&ws), 5);
        for s in s_values() {
            let spec = SingleSpec::new(s.clone(), table.clone(), 5);
            let single = solve_tubing(&spec).unwrap();
            let sys = solve_system(&spec.as_system()).unwrap();
            ensure(sys.values().next() == Some(&single), || format!("one type, s={s}"))?;
        }
    }
    Ok(())
}

fn line_graph_tubings() -> Check {
    for n in 1..=6 {
        for t in enumerate_plane_trees(n, &TreeDomain::Unweighted) {
            let host = FlatTree::new(&t).unwrap();
            let g = line_graph(&t).map_err(|e| e.to_string())?;
            let maximal = maximal_atubings(&g).map_err(|e| e.to_string())?;
            ensure(count_tubings(&t.canonicalize()) == maximal.len().into(), || {
                format!("count on {t}")
            })?;
            for tau in enumerate_tubings(&host) {
                let back = l_inverse(&t, &l_map(&tau)).map_err(|e| e.to_string())?;
                ensure(back == tau, || format!("L⁻¹L on {t} {tau}"))?;
            }
            for alpha in &maximal {
                let tau = l_inverse(&t, alpha).map_err(|e| e.to_string())?;
                ensure(&l_map(&tau) == alpha, || format!("LL⁻¹ on {t} {alpha}"))?;
            }
        }
    }
    ensure(maximal_atubings(&SimpleGraph::path(3)).unwrap().len() == 5, || {
        "path on 3 vertices".into()
    })?;
    ensure(maximal_atubings(&SimpleGraph::complete(3)).unwrap().len() == 6, || {
        "K_3".into()
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("counting goldens", counting_goldens),
        ("tubing count bounds", bounds),
        ("worked amplitudes", worked_examples),
        ("Yukawa anomalous dimension", yukawa),
        ("four-way solver equivalence", four_way),
        ("renormalization group recursion", rge),
        ("Hopf identities", hopf_identities),
        ("chord diagram bijection", bijections),
        ("chord expansion agreement", expansion_agreement),
        ("chord class correspondences", classes),
        ("systems", systems),
        ("line graphs and A-tubings", line_graph_tubings),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(()) => println!("PASS {:>2} {name} ({secs:.2}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {e} ({secs:.2}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
