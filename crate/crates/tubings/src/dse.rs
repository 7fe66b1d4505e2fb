//! Series solutions of propagator-type Dyson-Schwinger equations with a single
//! insertion place:
//!
//! G(x, L) = 1 + Σ_k x^k G(x, ∂_ρ)^{1+sk} (e^{Lρ} - 1) F_k(ρ) |_{ρ=0},
//! F_k(ρ) = Σ_i c_{i,k} ρ^{i-1},
//!
//! and of the typed systems where Q = ∏_a G_a^{s_a} replaces G^s. The main solver
//! sums tree amplitudes over binary tubings; the fixed-point iteration, the
//! convolution exponential and the Bell-polynomial formula are independent routes
//! to the same series.
//!
//! Signs follow G = 1 + c_0 L x + O(x^2).

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::hopf::{lambda_cocycle, Forest, SigmaEval};
use crate::lpoly::LPoly;
use crate::mellin::{MellinError, MellinTable};
use crate::scalar::{binomial, factorial, falling, Rational, Scalar};
use crate::trees::{
    enumerate_plane_trees, enumerate_rooted_trees, Decoration, FlatTree, PlaneTree, RootedTree, TreeDomain, TypeTag,
};
use crate::tubings::{mellin_monomial, tubing_profile, Tubing};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DseError {
    #[error(transparent)]
    Mellin(#[from] MellinError),
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("invalid specification: {0}")]
    Spec(String),
}

/// Truncated series 1 + Σ_{n=1}^{N} x^n p_n(L).
#[derive(Clone, Debug, PartialEq)]
pub struct GreenSeries<S> {
    terms: Vec<LPoly<S>>,
}

impl<S: Scalar> GreenSeries<S> {
    /// `terms[n-1]` is the coefficient of x^n.
    pub fn new(terms: Vec<LPoly<S>>) -> Self {
        GreenSeries { terms }
    }

    pub fn order(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of x^n for 1 ≤ n ≤ N.
    pub fn coeff(&self, n: usize) -> &LPoly<S> {
        &self.terms[n - 1]
    }

    pub fn terms(&self) -> &[LPoly<S>] {
        &self.terms
    }

    /// γ_k(x) = [L^k] G as the list of its x^1..x^N coefficients.
    pub fn gamma_k(&self, k: usize) -> Vec<S> {
        self.terms.iter().map(|p| p.coeff(k)).collect()
    }

    /// The anomalous dimension γ = γ_1.
    pub fn gamma(&self) -> Vec<S> {
        self.gamma_k(1)
    }

    /// [x^n] has L-degree at most n and no constant term.
    pub fn check_invariants(&self) -> bool {
        self.terms
            .iter()
            .enumerate()
            .all(|(i, p)| p.coeff(0).is_zero() && p.degree().is_none_or(|d| d <= i + 1))
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let mut cs: Vec<String> = p.coeffs().iter().map(|c| c.to_string()).collect();
                if cs.is_empty() {
                    cs.push("0".into());
                }
                json!({ "n": i + 1, "L_coeffs": cs })
            })
            .collect();
        json!({ "order": self.order(), "terms": terms })
    }
}

/// Single equation: kernels are the table's decorations, which share one type.
#[derive(Clone, Debug)]
pub struct SingleSpec<S> {
    pub s: Rational,
    pub mellin: MellinTable<S>,
    pub order: usize,
}

/// System indexed by types; the table holds c_{i,a,k} under decoration (a, k).
#[derive(Clone, Debug)]
pub struct SystemSpec<S> {
    pub s: BTreeMap<TypeTag, Rational>,
    pub mellin: MellinTable<S>,
    pub order: usize,
}

impl<S: Scalar> SingleSpec<S> {
    pub fn new(s: Rational, mellin: MellinTable<S>, order: usize) -> Self {
        SingleSpec { s, mellin, order }
    }

    fn validate(&self) -> Result<(), DseError> {
        if self.order == 0 {
            return Err(DseError::ZeroOrder);
        }
        let tags: std::collections::BTreeSet<TypeTag> = self.mellin.decorations().map(|d| d.tag).collect();
        if tags.len() != 1 {
            return Err(DseError::Spec(
                "a single equation needs exactly one decoration type".into(),
            ));
        }
        self.mellin.require_len(self.order)?;
        Ok(())
    }

    fn kernels(&self) -> Vec<Decoration> {
        self.mellin
            .decorations()
            .filter(|d| d.weight as usize <= self.order)
            .collect()
    }

    /// The same equation as a one-type system.
    pub fn as_system(&self) -> SystemSpec<S> {
        let tag = self.mellin.decorations().next().map(|d| d.tag).unwrap_or_default();
        SystemSpec {
            s: [(tag, self.s.clone())].into(),
            mellin: self.mellin.clone(),
            order: self.order,
        }
    }
}

impl<S: Scalar> SystemSpec<S> {
    fn validate(&self) -> Result<(), DseError> {
        if self.order == 0 {
            return Err(DseError::ZeroOrder);
        }
        if self.s.is_empty() {
            return Err(DseError::Spec("a system needs at least one type".into()));
        }
        for d in self.mellin.decorations() {
            if !self.s.contains_key(&d.tag) {
                return Err(DseError::Spec(format!(
                    "kernel type {:?} has no s parameter",
                    d.tag.as_str()
                )));
            }
        }
        self.mellin.require_len(self.order)?;
        Ok(())
    }

    fn kernels(&self) -> Vec<Decoration> {
        self.mellin
            .decorations()
            .filter(|d| d.weight as usize <= self.order)
            .collect()
    }
}

/// φ_L(τ) = c(τ) Σ_{i=1}^{b(τ)} c_{b(τ)-i, d(rt)} L^i/i!.
pub fn tubing_feynman_rules<S: Scalar>(
    tau: &Tubing,
    host: &FlatTree,
    table: &MellinTable<S>,
) -> Result<LPoly<S>, MellinError> {
    let c = mellin_monomial(tau, host, table)?;
    Ok(root_factor(tau.b(), host.deco[tau.root()], table)?.mul_scalar(&c))
}

/// Σ_{i=1}^{b} c_{b-i, d} L^i/i!
fn root_factor<S: Scalar>(b: usize, d: Decoration, table: &MellinTable<S>) -> Result<LPoly<S>, MellinError> {
    let mut out = vec![S::zero(); b + 1];
    for (i, slot) in out.iter_mut().enumerate().skip(1) {
        let inv = Rational::new(1.into(), factorial(i));
        *slot = table.get(b - i, d)?.scale(&inv);
    }
    Ok(LPoly::new(out))
}

/// φ_L(t) = Σ_τ φ_L(τ), computed from the b-profile of the tubings.
pub fn tree_amplitude<S: Scalar>(host: &FlatTree, table: &MellinTable<S>) -> Result<LPoly<S>, MellinError> {
    let prof = tubing_profile(host, table)?;
    let d = host.deco[0];
    let mut out = LPoly::zero();
    for (b, c) in prof.iter().enumerate().skip(1) {
        if !c.is_zero() {
            out += &root_factor(b, d, table)?.mul_scalar(c);
        }
    }
    Ok(out)
}

fn amplitude_of<S: Scalar>(t: &PlaneTree, table: &MellinTable<S>) -> Result<LPoly<S>, MellinError> {
    tree_amplitude(&FlatTree::new(t).expect("tree within size limit"), table)
}

/// ∏_v (1 + s w(v))_{od v} / |Aut t|
pub fn tree_prefactor(t: &RootedTree, s: &Rational) -> Rational {
    let mut acc = Rational::one();
    vertex_factors(t, &mut |v| {
        let top = Rational::one() + s * Rational::from_integer(v.deco().weight.into());
        acc *= falling(&top, v.children().len());
    });
    acc / Rational::from_integer(t.aut_order().into())
}

/// ∏_v binom(1 + s w(v), od v)
pub fn plane_prefactor(t: &PlaneTree, s: &Rational) -> Rational {
    fn go(t: &PlaneTree, s: &Rational, acc: &mut Rational) {
        let top = Rational::one() + s * Rational::from_integer(t.deco.weight.into());
        *acc *= binomial(&top, t.children.len());
        for c in &t.children {
            go(c, s, acc);
        }
    }
    let mut acc = Rational::one();
    go(t, s, &mut acc);
    acc
}

/// ∏_v ξ(v, s) / |Aut t| with typed out-degrees.
pub fn system_prefactor(t: &RootedTree, s: &BTreeMap<TypeTag, Rational>) -> Rational {
    let mut acc = Rational::one();
    vertex_factors(t, &mut |v| {
        let a = v.deco().tag;
        let w = Rational::from_integer(v.deco().weight.into());
        let mut od: BTreeMap<TypeTag, usize> = BTreeMap::new();
        for c in v.children() {
            *od.entry(c.deco().tag).or_default() += 1;
        }
        for (b, sb) in s {
            let k = od.get(b).copied().unwrap_or(0);
            let top = if *b == a { Rational::one() + sb * &w } else { sb * &w };
            acc *= falling(&top, k);
        }
    });
    acc / Rational::from_integer(t.aut_order().into())
}

fn vertex_factors(t: &RootedTree, f: &mut impl FnMut(&RootedTree)) {
    f(t);
    for c in t.children() {
        vertex_factors(c, f);
    }
}

/// One tree's contribution to the solution.
#[derive(Clone, Debug)]
pub struct TreeTerm<S> {
    pub tree: RootedTree,
    pub prefactor: Rational,
    pub amplitude: LPoly<S>,
}

/// Terms of the tubing expansion over non-plane trees, skipping vanishing prefactors.
pub fn tree_terms<S: Scalar>(spec: &SingleSpec<S>) -> Result<Vec<TreeTerm<S>>, DseError> {
    spec.validate()?;
    let domain = TreeDomain::Decorations(spec.kernels());
    let trees: Vec<RootedTree> = (1..=spec.order as u64)
        .flat_map(|w| enumerate_rooted_trees(w, &domain))
        .collect();
    trees
        .into_par_iter()
        .filter_map(|t| {
            let pre = tree_prefactor(&t, &spec.s);
            if pre.is_zero() {
                return None;
            }
            Some(amplitude_of(&t.to_plane(), &spec.mellin).map(|amplitude| TreeTerm {
                tree: t,
                prefactor: pre,
                amplitude,
            }))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(DseError::from)
}

fn collect_series<S: Scalar>(order: usize, items: impl IntoIterator<Item = (u64, LPoly<S>)>) -> GreenSeries<S> {
    let mut terms = vec![LPoly::zero(); order];
    for (w, p) in items {
        terms[w as usize - 1] += &p;
    }
    GreenSeries::new(terms)
}

/// G = 1 + Σ_t x^{w(t)} ∏_v (1+s w(v))_{od v} / |Aut t| · Σ_τ φ_L(τ).
pub fn solve_tubing<S: Scalar>(spec: &SingleSpec<S>) -> Result<GreenSeries<S>, DseError> {
    let terms = tree_terms(spec)?;
    Ok(collect_series(
        spec.order,
        terms
            .into_iter()
            .map(|t| (t.tree.weight(), t.amplitude.scale(&t.prefactor))),
    ))
}

/// The same expansion over plane trees with binomial vertex factors.
pub fn solve_tubing_plane<S: Scalar>(spec: &SingleSpec<S>) -> Result<GreenSeries<S>, DseError> {
    spec.validate()?;
    let domain = TreeDomain::Decorations(spec.kernels());
    let trees: Vec<PlaneTree> = (1..=spec.order as u64)
        .flat_map(|w| enumerate_plane_trees(w, &domain))
        .collect();
    let items = trees
        .into_par_iter()
        .filter_map(|t| {
            let pre = plane_prefactor(&t, &spec.s);
            if pre.is_zero() {
                return None;
            }
            Some(amplitude_of(&t, &spec.mellin).map(|a| (t.weight(), a.scale(&pre))))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(collect_series(spec.order, items))
}

/// The expansion with each tree amplitude evaluated as exp_*(Lσ).
pub fn solve_exp_star<S: Scalar>(spec: &SingleSpec<S>) -> Result<GreenSeries<S>, DseError> {
    spec.validate()?;
    let domain = TreeDomain::Decorations(spec.kernels());
    let mut ev = SigmaEval::new(&spec.mellin);
    let mut items = Vec::new();
    for w in 1..=spec.order as u64 {
        for t in enumerate_rooted_trees(w, &domain) {
            let pre = tree_prefactor(&t, &spec.s);
            if pre.is_zero() {
                continue;
            }
            let phi = ev.exp_star(&Forest::tree(t))?;
            items.push((w, phi.scale(&pre)));
        }
    }
    Ok(collect_series(spec.order, items))
}

/// Truncated series in x with L-polynomial coefficients; index 0 is the constant.
type Series<S> = Vec<LPoly<S>>;

fn series_one<S: Scalar>(order: usize) -> Series<S> {
    let mut v = vec![LPoly::zero(); order + 1];
    v[0] = LPoly::one();
    v
}

fn series_mul<S: Scalar>(a: &Series<S>, b: &Series<S>) -> Series<S> {
    let n = a.len() - 1;
    let mut out = vec![LPoly::zero(); n + 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            if !y.is_zero() {
                out[i + j] += &(x.clone() * y);
            }
        }
    }
    out
}

/// G^p = Σ_r binom(p, r) (G-1)^r for G with constant term 1.
fn series_pow<S: Scalar>(g: &Series<S>, p: &Rational) -> Series<S> {
    let n = g.len() - 1;
    let mut h = g.clone();
    h[0] = LPoly::zero();
    let mut out = series_one(n);
    let mut hr = series_one(n);
    for r in 1..=n {
        hr = series_mul(&hr, &h);
        let c = binomial(p, r);
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(&hr) {
            *o += &x.scale(&c);
        }
    }
    out
}

fn into_green<S: Scalar>(g: Series<S>) -> GreenSeries<S> {
    GreenSeries::new(g.into_iter().skip(1).collect())
}

/// Iterates G ← 1 + Σ_k x^k Λ^{(k)}(G^{1+sk}) from G = 1; N rounds fix order N.
pub fn solve_fixed_point<S: Scalar>(spec: &SingleSpec<S>) -> Result<GreenSeries<S>, DseError> {
    spec.validate()?;
    let n = spec.order;
    let kernels = spec.kernels();
    let mut g = series_one::<S>(n);
    for _ in 0..n {
        let mut next = series_one(n);
        for &d in &kernels {
            let k = d.weight as usize;
            let exp = Rational::one() + &spec.s * Rational::from_integer(k.into());
            let p = series_pow(&g, &exp);
            for m in 0..=n - k {
                if !p[m].is_zero() {
                    next[m + k] += &lambda_cocycle(d, &spec.mellin, &p[m])?;
                }
            }
        }
        g = next;
    }
    Ok(into_green(g))
}

/// Iterates G_a ← 1 + Σ_k x^k Λ^{(a,k)}(G_a Q^k) with Q = ∏_b G_b^{s_b}.
pub fn solve_fixed_point_system<S: Scalar>(
    spec: &SystemSpec<S>,
) -> Result<BTreeMap<TypeTag, GreenSeries<S>>, DseError> {
    spec.validate()?;
    let n = spec.order;
    let kernels = spec.kernels();
    let mut gs: BTreeMap<TypeTag, Series<S>> = spec.s.keys().map(|&a| (a, series_one(n))).collect();
    for _ in 0..n {
        let mut next: BTreeMap<TypeTag, Series<S>> = spec.s.keys().map(|&a| (a, series_one(n))).collect();
        for &d in &kernels {
            let k = Rational::from_integer(d.weight.into());
            let mut prod = gs[&d.tag].clone();
            for (b, sb) in &spec.s {
                prod = series_mul(&prod, &series_pow(&gs[b], &(sb * &k)));
            }
            let w = d.weight as usize;
            let target = next.get_mut(&d.tag).expect("validated type");
            for m in 0..=n - w {
                if !prod[m].is_zero() {
                    target[m + w] += &lambda_cocycle(d, &spec.mellin, &prod[m])?;
                }
            }
        }
        gs = next;
    }
    Ok(gs.into_iter().map(|(a, g)| (a, into_green(g))).collect())
}

/// G_a = 1 + Σ_{α(rt t) = a} ∏_v ξ(v, s) φ_L(t) x^{w(t)} / |Aut t|.
pub fn solve_system<S: Scalar>(spec: &SystemSpec<S>) -> Result<BTreeMap<TypeTag, GreenSeries<S>>, DseError> {
    spec.validate()?;
    let domain = TreeDomain::Decorations(spec.kernels());
    let trees: Vec<RootedTree> = (1..=spec.order as u64)
        .flat_map(|w| enumerate_rooted_trees(w, &domain))
        .collect();
    let items = trees
        .into_par_iter()
        .filter_map(|t| {
            let pre = system_prefactor(&t, &spec.s);
            if pre.is_zero() {
                return None;
            }
            Some(amplitude_of(&t.to_plane(), &spec.mellin).map(|a| (t.deco().tag, t.weight(), a.scale(&pre))))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut out: BTreeMap<TypeTag, Vec<(u64, LPoly<S>)>> = spec.s.keys().map(|&a| (a, Vec::new())).collect();
    for (a, w, p) in items {
        out.get_mut(&a).expect("validated type").push((w, p));
    }
    Ok(out
        .into_iter()
        .map(|(a, v)| (a, collect_series(spec.order, v)))
        .collect())
}

/// γ(x) as the list [x^1]γ, ..., [x^N]γ.
pub fn anomalous_dimension<S: Scalar>(g: &GreenSeries<S>) -> Vec<S> {
    g.gamma()
}

/// Checks k γ_k = γ (1 + s x∂_x) γ_{k-1} for every k ≤ N, and γ_k = γ^k/k! when s = 0.
pub fn rge_check<S: Scalar>(g: &GreenSeries<S>, s: &Rational) -> bool {
    if !g.check_invariants() {
        return false;
    }
    let n = g.order();
    let gamma = g.gamma();
    let mut prev = gamma.clone();
    for k in 2..=n {
        let cur = g.gamma_k(k);
        for m in 1..=n {
            let mut rhs = S::zero();
            for a in 1..m {
                let b = m - a;
                let f = Rational::one() + s * Rational::from_integer(b.into());
                rhs += &(gamma[a - 1].clone() * &prev[b - 1]).scale(&f);
            }
            if cur[m - 1].scale(&Rational::from_integer(k.into())) != rhs {
                return false;
            }
        }
        prev = cur;
    }
    if s.is_zero() {
        let mut power = gamma.clone();
        for k in 2..=n {
            power = truncated_mul(&power, &gamma);
            let inv = Rational::new(1.into(), factorial(k));
            let want: Vec<S> = power.iter().map(|c| c.scale(&inv)).collect();
            if g.gamma_k(k) != want {
                return false;
            }
        }
    }
    true
}

/// Product of two series given by their x^1..x^N coefficients.
fn truncated_mul<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let n = a.len();
    let mut out = vec![S::zero(); n];
    for i in 0..n {
        for j in 0..n {
            if i + j + 2 <= n {
                out[i + j + 1] += &(a[i].clone() * &b[j]);
            }
        }
    }
    out
}

/// Partial Bell polynomial B_{n,j}(x_1, ..., x_{n-j+1}).
pub fn bell_partial<S: Scalar>(n: usize, j: usize, args: &[S]) -> S {
    assert!(n >= j, "bell_partial needs j <= n");
    if n == 0 && j == 0 {
        return S::one();
    }
    if j == 0 {
        return S::zero();
    }
    assert!(args.len() > n - j, "bell_partial needs at least n-j+1 arguments");
    let mut total = S::zero();
    let mut mult = vec![0usize; n - j + 2];
    bell_rec(n, j, 1, n - j + 1, &mut mult, args, &mut total);
    total
}

fn bell_rec<S: Scalar>(
    rem_n: usize,
    rem_j: usize,
    m: usize,
    top: usize,
    mult: &mut [usize],
    args: &[S],
    total: &mut S,
) {
    if rem_n == 0 && rem_j == 0 {
        let n: usize = mult.iter().enumerate().map(|(m, i)| m * i).sum();
        let mut coeff = Rational::from_integer(factorial(n));
        let mut term = S::one();
        for (mm, &i) in mult.iter().enumerate().skip(1) {
            if i == 0 {
                continue;
            }
            let den = factorial(i) * num_traits::pow(factorial(mm), i);
            coeff /= Rational::from_integer(den);
            for _ in 0..i {
                term = term * &args[mm - 1];
            }
        }
        *total += &term.scale(&coeff);
        return;
    }
    if m > top || rem_j == 0 || rem_n == 0 {
        return;
    }
    let max_i = (rem_n / m).min(rem_j);
    for i in 0..=max_i {
        mult[m] = i;
        bell_rec(rem_n - i * m, rem_j - i, m + 1, top, mult, args, total);
    }
    mult[m] = 0;
}

/// Anomalous dimension of the linear equation (s = 0, one weight-one kernel):
/// [x^1]γ = c_0 and [x^n]γ = Σ_{j=1}^{n-1} c_0^{n-j}/(n-j)! B_{n-1,j}(1!c_1, 2!c_2, ...).
pub fn linear_dse_coeffs<S: Scalar>(
    table: &MellinTable<S>,
    d: Decoration,
    order: usize,
) -> Result<Vec<S>, MellinError> {
    let c0 = table.get(0, d)?.clone();
    let mut args = Vec::new();
    for m in 1..order.max(1) {
        args.push(table.get(m, d)?.scale(&Rational::from_integer(factorial(m))));
    }
    let mut out = vec![c0.clone()];
    for n in 2..=order {
        let mut acc = S::zero();
        for j in 1..n {
            let mut p = S::one();
            for _ in 0..n - j {
                p = p * &c0;
            }
            let inv = Rational::new(1.into(), factorial(n - j));
            acc += &(p * &bell_partial(n - 1, j, &args)).scale(&inv);
        }
        out.push(acc);
    }
    out.truncate(order);
    Ok(out)
}
