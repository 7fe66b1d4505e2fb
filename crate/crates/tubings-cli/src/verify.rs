use std::collections::BTreeSet;
use std::io::Write;

use anyhow::{bail, Result};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tubings::chords::{
    chord_expansion, enumerate_connected_diagrams, mu, nu, special_class_check, terminal_correspondence_check, theta,
    tubed_plane_trees, ChordDiagram,
};
use tubings::dse::{
    anomalous_dimension, rge_check, solve_exp_star, solve_fixed_point, solve_tubing, solve_tubing_plane, SingleSpec,
};
use tubings::hopf::{bplus_cocycle_holds, coassociative, counital, enumerate_forests, sigma_bplus_identity_check};
use tubings::linegraph::{l_inverse, l_map, line_graph, maximal_atubings};
use tubings::sample::{random_connected_diagram, random_plane_tree, random_tubing};
use tubings::trees::{enumerate_plane_trees, enumerate_rooted_trees, parse_tree};
use tubings::tubings::{count_tubings, enumerate_tubings};
use tubings::{Decoration, FlatTree, MellinTable, PlaneTree, Rational, RootedTree, TreeDomain};

use crate::{Cli, Outcome};

type Check = std::result::Result<(), String>;

struct Ctx {
    max: usize,
    seed: u64,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn catalan(n: usize) -> BigUint {
    let mut c = BigUint::from(1u32);
    for k in 0..n {
        c = c * BigUint::from(2 * (2 * k + 1)) / BigUint::from(k + 2);
    }
    c
}

fn factorial(n: usize) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

fn unweighted(n: usize) -> Vec<RootedTree> {
    enumerate_rooted_trees(n as u64, &TreeDomain::Unweighted)
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn rooted_counts(ctx: &Ctx) -> Check {
    // a(n+1) = (1/n) Σ_{k=1}^{n} (Σ_{d|k} d a(d)) a(n-k+1)
    let m = ctx.max.min(10);
    let mut a = vec![0u64; m + 1];
    a[1] = 1;
    for n in 1..m {
        let mut s = 0;
        for k in 1..=n {
            let inner: u64 = (1..=k).filter(|d| k % d == 0).map(|d| d as u64 * a[d]).sum();
            s += inner * a[n - k + 1];
        }
        a[n + 1] = s / n as u64;
    }
    for (n, &want) in a.iter().enumerate().skip(1) {
        ensure(unweighted(n).len() as u64 == want, || {
            format!("rooted trees with {n} vertices")
        })?;
    }
    Ok(())
}

fn embedding_sums(ctx: &Ctx) -> Check {
    for n in 1..=ctx.max.min(9) {
        let trees = unweighted(n);
        let plane: BigUint = trees.iter().map(RootedTree::plane_embeddings).sum();
        ensure(plane == catalan(n - 1), || format!("plane embeddings at n={n}"))?;
        let planes = enumerate_plane_trees(n as u64, &TreeDomain::Unweighted);
        ensure(BigUint::from(planes.len()) == plane, || {
            format!("plane enumeration at n={n}")
        })?;
        // labellings of a fixed vertex set, so each class is hit |Aut| times
        let dec: BigUint = trees.iter().map(|t| t.decreasing_labellings() / t.aut_order()).sum();
        ensure(dec == factorial(n - 1), || format!("decreasing labellings at n={n}"))?;
    }
    Ok(())
}

fn parse_roundtrip(ctx: &Ctx) -> Check {
    let domain = TreeDomain::Decorations(vec![Decoration::weight(1), Decoration::weight(2)]);
    for w in 1..=ctx.max.min(7) as u64 {
        for t in enumerate_plane_trees(w, &domain) {
            let back = parse_tree(&t.to_string()).map_err(err)?;
            ensure(back == t, || format!("text round trip of {t}"))?;
            let j = PlaneTree::from_json(&t.to_json()).map_err(err)?;
            ensure(j == t, || format!("JSON round trip of {t}"))?;
        }
    }
    Ok(())
}

fn goldens(ctx: &Ctx) -> Check {
    for n in 1..=ctx.max.max(2) + 3 {
        let l = count_tubings(&PlaneTree::ladder(n).canonicalize());
        ensure(l == catalan(n - 1), || format!("ladder with {n} vertices: {l}"))?;
        let s = count_tubings(&PlaneTree::corolla(n).canonicalize());
        ensure(s == factorial(n - 1), || format!("corolla with {n} vertices: {s}"))?;
    }
    let fork = parse_tree("1(1(1(1),1))").map_err(err)?.canonicalize();
    ensure(count_tubings(&fork) == 18u32.into(), || "five-vertex fork".into())
}

fn tube_structure(ctx: &Ctx) -> Check {
    for n in 1..=ctx.max.min(8) {
        for t in unweighted(n) {
            let host = FlatTree::new(&t.to_plane()).map_err(err)?;
            let all = enumerate_tubings(&host);
            let c = count_tubings(&t);
            ensure(BigUint::from(all.len()) == c, || format!("enumeration vs count on {t}"))?;
            ensure(c >= catalan(n - 1) && c <= factorial(n - 1), || {
                format!("bounds on {t}")
            })?;
            let distinct: BTreeSet<_> = all.iter().collect();
            ensure(distinct.len() == all.len(), || format!("duplicate tubing on {t}"))?;
            for tau in &all {
                tau.validate(&host).map_err(err)?;
                ensure(tau.tubes().len() == 2 * n - 1, || format!("{tau} on {t}"))?;
            }
        }
    }
    Ok(())
}

fn hopf_axioms(ctx: &Ctx) -> Check {
    for f in enumerate_forests(ctx.max.min(5) as u64, &TreeDomain::Unweighted) {
        ensure(coassociative(&f), || format!("coassociativity on {f:?}"))?;
        ensure(counital(&f), || format!("counit on {f:?}"))?;
    }
    Ok(())
}

fn hopf_cocycles(ctx: &Ctx) -> Check {
    let decos = vec![Decoration::weight(1), Decoration::weight(2)];
    let domain = TreeDomain::Decorations(decos.clone());
    let w = ctx.max.min(4) as u64;
    for f in enumerate_forests(w, &domain) {
        for &d in &decos {
            ensure(bplus_cocycle_holds(&f, d), || format!("B+ cocycle on {f:?}"))?;
        }
    }
    let table = MellinTable::symbolic(decos, w as usize + 2);
    ensure(sigma_bplus_identity_check(&table, w).map_err(err)?, || {
        "σ B+ identity".into()
    })
}

fn yukawa(ctx: &Ctx) -> Check {
    let n = ctx.max.max(1) + 3;
    let g = solve_tubing(&SingleSpec::new(int(0), MellinTable::yukawa(n), n)).map_err(err)?;
    let gamma = anomalous_dimension(&g);
    for (i, c) in gamma.iter().enumerate() {
        let want = -Rational::from_integer(catalan(i).into());
        ensure(*c == want, || format!("[x^{}]γ = {c}", i + 1))?;
    }
    Ok(())
}

fn solver_agreement(ctx: &Ctx) -> Check {
    let order = ctx.max.clamp(1, 5);
    for ws in [vec![1u32], vec![1, 2]] {
        let table = MellinTable::symbolic(ws.iter().map(|&w| Decoration::weight(w)), order);
        for s in [int(-2), int(-1), int(0), Rational::new(1.into(), 2.into()), int(1)] {
            let spec = SingleSpec::new(s.clone(), table.clone(), order);
            let tag = || format!("s={s} kernels={ws:?}");
            let a = solve_tubing(&spec).map_err(err)?;
            ensure(a.check_invariants(), || format!("series shape, {}", tag()))?;
            ensure(a == solve_tubing_plane(&spec).map_err(err)?, || {
                format!("plane expansion, {}", tag())
            })?;
            ensure(a == solve_fixed_point(&spec).map_err(err)?, || {
                format!("fixed point, {}", tag())
            })?;
            ensure(a == solve_exp_star(&spec).map_err(err)?, || {
                format!("exponential, {}", tag())
            })?;
            ensure(rge_check(&a, &s), || format!("recursion, {}", tag()))?;
        }
    }
    Ok(())
}

fn connected_counts(n: usize) -> Vec<u64> {
    let mut c = vec![0u64; n + 1];
    if n >= 1 {
        c[1] = 1;
    }
    for m in 2..=n {
        c[m] = (m as u64 - 1) * (1..m).map(|k| c[k] * c[m - k]).sum::<u64>();
    }
    c
}

fn chord_bijection(ctx: &Ctx) -> Check {
    let m = ctx.max.min(6);
    let counts = connected_counts(m);
    for (n, &count) in counts.iter().enumerate().skip(1) {
        let mut images = BTreeSet::new();
        for (t, tau) in tubed_plane_trees(n) {
            let img = theta(&t, &tau).map_err(err)?;
            let (t2, tau2, _) = mu(&img.diagram).map_err(err)?;
            ensure(t2 == t && tau2 == tau, || format!("inverse on {t} {tau}"))?;
            ensure(terminal_correspondence_check(&t, &tau).map_err(err)?, || {
                format!("terminals of {t} {tau}")
            })?;
            let nus = nu(&img.diagram).map_err(err)?;
            let flat = FlatTree::new(&t).map_err(err)?;
            for (i, &v) in img.vertex.iter().enumerate() {
                ensure(nus[i] == flat.children[v].len(), || {
                    format!("out-degrees on {}", img.diagram)
                })?;
            }
            images.insert(img.diagram);
        }
        let all: BTreeSet<ChordDiagram> = enumerate_connected_diagrams(n).into_iter().collect();
        ensure(all.len() as u64 == count, || format!("connected diagrams at n={n}"))?;
        ensure(images == all, || format!("image at n={n}"))?;
    }
    Ok(())
}

fn chord_random(ctx: &Ctx) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    for i in 0..200 {
        let n = 1 + i % ctx.max.clamp(1, 10);
        let t = random_plane_tree(n, &[1], &mut rng);
        let host = FlatTree::new(&t).map_err(err)?;
        let tau = random_tubing(&host, &mut rng);
        let img = theta(&t, &tau).map_err(err)?;
        let (t2, tau2, _) = mu(&img.diagram).map_err(err)?;
        ensure(t2 == t && tau2 == tau, || format!("inverse on {t} {tau}"))?;
        let c = random_connected_diagram(n, &mut rng);
        let (t, tau, _) = mu(&c).map_err(err)?;
        ensure(theta(&t, &tau).map_err(err)?.diagram == c, || format!("inverse on {c}"))?;
    }
    Ok(())
}

fn chord_classes(ctx: &Ctx) -> Check {
    for n in 1..=ctx.max.min(6) {
        let r = special_class_check(n).map_err(err)?;
        ensure(r.ladder_image_matches, || format!("ladder class at n={n}"))?;
        ensure(r.leaf_image_matches, || format!("leaf class at n={n}"))?;
        let df: usize = (1..n).map(|k| 2 * k - 1).product();
        ensure(r.one_terminal == df, || {
            format!("{} one-terminal diagrams at n={n}", r.one_terminal)
        })?;
    }
    Ok(())
}

fn chord_expansion_check(ctx: &Ctx) -> Check {
    let order = ctx.max.clamp(1, 4);
    for ws in [vec![1u32], vec![1, 2]] {
        let table = MellinTable::symbolic(ws.iter().map(|&w| Decoration::weight(w)), order);
        for s in [int(-1), int(-2), int(-3)] {
            let a = chord_expansion(&s, &table, order).map_err(err)?;
            let b = solve_tubing(&SingleSpec::new(s.clone(), table.clone(), order)).map_err(err)?;
            ensure(a == b, || format!("s={s} kernels={ws:?}"))?;
        }
    }
    Ok(())
}

fn line_graphs(ctx: &Ctx) -> Check {
    for n in 1..=ctx.max.min(6) {
        for t in enumerate_plane_trees(n as u64, &TreeDomain::Unweighted) {
            let host = FlatTree::new(&t).map_err(err)?;
            let g = line_graph(&t).map_err(err)?;
            let maximal = maximal_atubings(&g).map_err(err)?;
            ensure(count_tubings(&t.canonicalize()) == maximal.len().into(), || {
                format!("count on {t}")
            })?;
            for tau in enumerate_tubings(&host) {
                let back = l_inverse(&t, &l_map(&tau)).map_err(err)?;
                ensure(back == tau, || format!("round trip on {t} {tau}"))?;
            }
        }
    }
    Ok(())
}

type Entry = (&'static str, &'static str, fn(&Ctx) -> Check);

const CHECKS: &[Entry] = &[
    ("trees", "rooted_counts", rooted_counts),
    ("trees", "embedding_sums", embedding_sums),
    ("trees", "round_trips", parse_roundtrip),
    ("tubings", "goldens", goldens),
    ("tubings", "tube_structure", tube_structure),
    ("hopf", "axioms", hopf_axioms),
    ("hopf", "cocycles", hopf_cocycles),
    ("dse", "yukawa", yukawa),
    ("dse", "solver_agreement", solver_agreement),
    ("chords", "bijection", chord_bijection),
    ("chords", "random_round_trips", chord_random),
    ("chords", "classes", chord_classes),
    ("chords", "expansion", chord_expansion_check),
    ("linegraph", "atubings", line_graphs),
];

pub fn run(cli: &Cli, out: &mut impl Write) -> Result<Outcome> {
    let suite = cli.suite.as_str();
    if suite != "all" && !CHECKS.iter().any(|(s, _, _)| *s == suite) {
        bail!("unknown suite {suite:?}");
    }
    let ctx = Ctx {
        max: cli.max,
        seed: cli.seed,
    };
    let mut failed = 0;
    for (s, name, check) in CHECKS.iter().filter(|(s, _, _)| suite == "all" || *s == suite) {
        match std::panic::catch_unwind(|| check(&ctx)).unwrap_or_else(|_| Err("panicked".into())) {
            Ok(()) => writeln!(out, "PASS {s}/{name}")?,
            Err(e) => {
                failed += 1;
                writeln!(out, "FAIL {s}/{name}: {e}")?;
            }
        }
    }
    Ok(if failed == 0 {
        Outcome::Done
    } else {
        Outcome::ChecksFailed
    })
}
