//! Connes-Kreimer Hopf algebra of decorated rooted forests, grafting, convolution of
//! functionals, the infinitesimal character σ built from tubings and the 1-cocycles
//! acting on polynomials in L.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::lpoly::LPoly;
use crate::mellin::{MellinError, MellinTable};
use crate::scalar::{factorial, Rational, Scalar};
use crate::trees::{enumerate_rooted_trees, Decoration, FlatTree, RootedTree, TreeDomain};
use crate::tubings::tubing_profile;

/// Multiset of rooted trees in canonical order. The empty forest is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Forest(Vec<RootedTree>);

impl Forest {
    pub fn empty() -> Self {
        Forest(Vec::new())
    }

    pub fn new(mut trees: Vec<RootedTree>) -> Self {
        trees.sort();
        Forest(trees)
    }

    pub fn tree(t: RootedTree) -> Self {
        Forest(vec![t])
    }

    pub fn trees(&self) -> &[RootedTree] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> usize {
        self.0.iter().map(RootedTree::size).sum()
    }

    pub fn weight(&self) -> u64 {
        self.0.iter().map(RootedTree::weight).sum()
    }

    pub fn mul(&self, other: &Forest) -> Forest {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Forest::new(v)
    }

    /// The single tree, if the forest is connected.
    pub fn as_tree(&self) -> Option<&RootedTree> {
        match self.0.as_slice() {
            [t] => Some(t),
            _ => None,
        }
    }
}

pub type ForestSum = BTreeMap<Forest, Rational>;
pub type TensorSum = BTreeMap<(Forest, Forest), Rational>;
pub type Tensor3Sum = BTreeMap<(Forest, Forest, Forest), Rational>;

fn add_to<K: Ord>(m: &mut BTreeMap<K, Rational>, k: K, c: Rational) {
    if c.is_zero() {
        return;
    }
    *m.entry(k).or_insert_with(Rational::zero) += c;
}

fn prune<K: Ord>(m: BTreeMap<K, Rational>) -> BTreeMap<K, Rational> {
    m.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Admissible cuts of a tree: (pruned forest, remaining trunk). The trunk is `None`
/// when the whole tree is cut off.
fn cuts(t: &RootedTree) -> Vec<(Vec<RootedTree>, Option<RootedTree>)> {
    let mut out = vec![(vec![t.clone()], None)];
    let mut partial: Vec<(Vec<RootedTree>, Vec<RootedTree>)> = vec![(Vec::new(), Vec::new())];
    for c in t.children() {
        let sub = cuts(c);
        let mut next = Vec::with_capacity(partial.len() * sub.len());
        for (pruned, kept) in &partial {
            for (sp, st) in &sub {
                let mut p = pruned.clone();
                p.extend(sp.iter().cloned());
                let mut k = kept.clone();
                k.extend(st.iter().cloned());
                next.push((p, k));
            }
        }
        partial = next;
    }
    for (pruned, kept) in partial {
        out.push((pruned, Some(RootedTree::new(t.deco(), kept))));
    }
    out
}

/// Δt = Σ_f f ⊗ (t ∖ f) with f running over the rooted subforests, extended
/// multiplicatively to forests.
pub fn coproduct(f: &Forest) -> TensorSum {
    let mut acc: TensorSum = [((Forest::empty(), Forest::empty()), Rational::one())].into();
    for t in f.trees() {
        let mut single = TensorSum::new();
        for (pruned, trunk) in cuts(t) {
            let right = trunk.map(Forest::tree).unwrap_or_default();
            add_to(&mut single, (Forest::new(pruned), right), Rational::one());
        }
        let mut next = TensorSum::new();
        for ((a, b), x) in &acc {
            for ((c, d), y) in &single {
                add_to(&mut next, (a.mul(c), b.mul(d)), x * y);
            }
        }
        acc = prune(next);
    }
    acc
}

pub fn b_plus(f: &Forest, d: Decoration) -> RootedTree {
    RootedTree::graft(d, f.trees())
}

/// Counit: 1 on the empty forest, 0 elsewhere.
pub fn counit(f: &Forest) -> Rational {
    if f.is_empty() {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// (Δ ⊗ id)Δ f
pub fn coproduct_left(f: &Forest) -> Tensor3Sum {
    let mut out = Tensor3Sum::new();
    for ((a, b), x) in coproduct(f) {
        for ((a1, a2), y) in coproduct(&a) {
            add_to(&mut out, (a1, a2, b.clone()), &x * y);
        }
    }
    prune(out)
}

/// (id ⊗ Δ)Δ f
pub fn coproduct_right(f: &Forest) -> Tensor3Sum {
    let mut out = Tensor3Sum::new();
    for ((a, b), x) in coproduct(f) {
        for ((b1, b2), y) in coproduct(&b) {
            add_to(&mut out, (a.clone(), b1, b2), &x * y);
        }
    }
    prune(out)
}

pub fn coassociative(f: &Forest) -> bool {
    coproduct_left(f) == coproduct_right(f)
}

/// (ε ⊗ id)Δ = id = (id ⊗ ε)Δ
pub fn counital(f: &Forest) -> bool {
    let mut left = ForestSum::new();
    let mut right = ForestSum::new();
    for ((a, b), x) in coproduct(f) {
        add_to(&mut left, b.clone(), counit(&a) * &x);
        add_to(&mut right, a, counit(&b) * x);
    }
    let want: ForestSum = [(f.clone(), Rational::one())].into();
    prune(left) == want && prune(right) == want
}

/// ΔB₊(f) = B₊(f) ⊗ 1 + (id ⊗ B₊)Δf
pub fn bplus_cocycle_holds(f: &Forest, d: Decoration) -> bool {
    let lhs = coproduct(&Forest::tree(b_plus(f, d)));
    let mut rhs = TensorSum::new();
    add_to(&mut rhs, (Forest::tree(b_plus(f, d)), Forest::empty()), Rational::one());
    for ((a, b), x) in coproduct(f) {
        add_to(&mut rhs, (a, Forest::tree(b_plus(&b, d))), x);
    }
    lhs == prune(rhs)
}

/// (α * β)(f) = Σ α(f') β(f'') over Δf.
pub fn convolve<S: Scalar>(alpha: &dyn Fn(&Forest) -> S, beta: &dyn Fn(&Forest) -> S, f: &Forest) -> S {
    let mut acc = S::zero();
    for ((a, b), c) in coproduct(f) {
        acc += &(alpha(&a) * &beta(&b)).scale(&c);
    }
    acc
}

/// All forests of total weight at most `max_weight` over the domain, empty forest first.
pub fn enumerate_forests(max_weight: u64, domain: &TreeDomain) -> Vec<Forest> {
    let mut trees: Vec<RootedTree> = Vec::new();
    for w in 1..=max_weight {
        trees.extend(enumerate_rooted_trees(w, domain));
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    grow_forests(&trees, 0, max_weight, &mut cur, &mut out);
    out.sort_by(|a, b| (a.weight(), a).cmp(&(b.weight(), b)));
    out
}

fn grow_forests(trees: &[RootedTree], start: usize, budget: u64, cur: &mut Vec<RootedTree>, out: &mut Vec<Forest>) {
    out.push(Forest::new(cur.clone()));
    for i in start..trees.len() {
        let w = trees[i].weight();
        if w <= budget {
            cur.push(trees[i].clone());
            grow_forests(trees, i, budget - w, cur, out);
            cur.pop();
        }
    }
}

/// Λ^{(d)}(L^n/n!) = Σ_{j=0}^{n} c_{j,d} L^{n-j+1}/(n-j+1)!, extended linearly.
pub fn lambda_cocycle<S: Scalar>(d: Decoration, table: &MellinTable<S>, p: &LPoly<S>) -> Result<LPoly<S>, MellinError> {
    let dc = p.divided_coeffs();
    let top = dc.len() + 1;
    let mut out = vec![S::zero(); top];
    for (n, a) in dc.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for j in 0..=n {
            let m = n - j + 1;
            let inv = Rational::new(1.into(), factorial(m));
            out[m] += &(a.clone() * table.get(j, d)?).scale(&inv);
        }
    }
    Ok(LPoly::new(out))
}

/// p(L₁ + L₂) as a polynomial in L₁ with coefficients in L₂: the coproduct of K[L].
pub fn lpoly_coproduct<S: Scalar>(p: &LPoly<S>) -> LPoly<LPoly<S>> {
    let c = p.coeffs();
    let mut outer = Vec::with_capacity(c.len());
    for i in 0..c.len() {
        let inner: Vec<S> = (0..c.len() - i)
            .map(|j| c[i + j].scale(&Rational::from_integer(binom_int(i + j, i))))
            .collect();
        outer.push(LPoly::new(inner));
    }
    LPoly::new(outer)
}

fn binom_int(n: usize, k: usize) -> num_bigint::BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Checks ΔΛp = Λp ⊗ 1 + (id ⊗ Λ)Δp.
pub fn lambda_cocycle_holds<S: Scalar>(
    d: Decoration,
    table: &MellinTable<S>,
    p: &LPoly<S>,
) -> Result<bool, MellinError> {
    let lp = lambda_cocycle(d, table, p)?;
    let lhs = lpoly_coproduct(&lp);
    // Λp ⊗ 1 puts Λp in the outer (left) variable.
    let left = LPoly::new(lp.coeffs().iter().map(|c| LPoly::constant(c.clone())).collect());
    let dp = lpoly_coproduct(p);
    let right = LPoly::new(
        dp.coeffs()
            .iter()
            .map(|q| lambda_cocycle(d, table, q))
            .collect::<Result<Vec<_>, _>>()?,
    );
    Ok(lhs == left + right)
}

/// Evaluation context for σ, its convolution powers and exp_*(Lσ), memoized on
/// canonical forests.
pub struct SigmaEval<'a, S: Scalar> {
    table: &'a MellinTable<S>,
    profiles: HashMap<RootedTree, Arc<Vec<S>>>,
    coproducts: HashMap<Forest, Arc<TensorSum>>,
    powers: HashMap<(Forest, usize), S>,
}

impl<'a, S: Scalar> SigmaEval<'a, S> {
    pub fn new(table: &'a MellinTable<S>) -> Self {
        SigmaEval {
            table,
            profiles: HashMap::new(),
            coproducts: HashMap::new(),
            powers: HashMap::new(),
        }
    }

    fn profile(&mut self, t: &RootedTree) -> Result<Arc<Vec<S>>, MellinError> {
        if let Some(p) = self.profiles.get(t) {
            return Ok(p.clone());
        }
        let flat = FlatTree::new(&t.to_plane()).expect("tree within size limit");
        let p = Arc::new(tubing_profile(&flat, self.table)?);
        self.profiles.insert(t.clone(), p.clone());
        Ok(p)
    }

    fn coproduct(&mut self, f: &Forest) -> Arc<TensorSum> {
        self.coproducts
            .entry(f.clone())
            .or_insert_with(|| Arc::new(coproduct(f)))
            .clone()
    }

    /// σ(t) = Σ_τ c_{b(τ)-1, d(rt)} c(τ); zero on the empty and on disconnected forests.
    pub fn sigma(&mut self, f: &Forest) -> Result<S, MellinError> {
        match f.as_tree() {
            Some(t) => self.sigma_star_formula(t, 1),
            None => Ok(S::zero()),
        }
    }

    /// Σ_{τ: b(τ) ≥ k} c_{b(τ)-k, d(rt)} c(τ), the tubing expression for σ^{*k}(t).
    pub fn sigma_star_formula(&mut self, t: &RootedTree, k: usize) -> Result<S, MellinError> {
        let prof = self.profile(t)?;
        let mut acc = S::zero();
        for (b, c) in prof.iter().enumerate() {
            if b >= k && b >= 1 && !c.is_zero() {
                acc += &(c.clone() * self.table.get(b - k, t.deco())?);
            }
        }
        Ok(acc)
    }

    /// σ^{*k}(f) by repeated convolution, σ^{*0} = ε.
    pub fn sigma_star(&mut self, f: &Forest, k: usize) -> Result<S, MellinError> {
        if k == 0 {
            return Ok(S::from_rational(counit(f)));
        }
        if k > f.size() {
            return Ok(S::zero());
        }
        if k == 1 {
            return self.sigma(f);
        }
        if let Some(v) = self.powers.get(&(f.clone(), k)) {
            return Ok(v.clone());
        }
        let delta = self.coproduct(f);
        let mut acc = S::zero();
        for ((a, b), c) in delta.iter() {
            if b.as_tree().is_none() || a.size() < k - 1 {
                continue;
            }
            let x = self.sigma_star(a, k - 1)?;
            if x.is_zero() {
                continue;
            }
            let y = self.sigma(b)?;
            acc += &(x * &y).scale(c);
        }
        self.powers.insert((f.clone(), k), acc.clone());
        Ok(acc)
    }

    /// exp_*(Lσ)(f) = Σ_k L^k/k! σ^{*k}(f).
    pub fn exp_star(&mut self, f: &Forest) -> Result<LPoly<S>, MellinError> {
        let mut out = LPoly::zero();
        for k in 0..=f.size() {
            let s = self.sigma_star(f, k)?;
            if !s.is_zero() {
                out += &LPoly::divided_power(k).mul_scalar(&s);
            }
        }
        Ok(out)
    }

    /// σ(B₊^{(d)} f) = Σ_i c_{i,d} σ^{*i}(f).
    pub fn sigma_bplus_holds(&mut self, f: &Forest, d: Decoration) -> Result<bool, MellinError> {
        let lhs = self.sigma(&Forest::tree(b_plus(f, d)))?;
        let mut rhs = S::zero();
        for i in 0..=f.size() {
            let s = self.sigma_star(f, i)?;
            if !s.is_zero() {
                rhs += &(self.table.get(i, d)?.clone() * &s);
            }
        }
        Ok(lhs == rhs)
    }
}

/// Checks σB₊^{(d)} = Σ_i c_{i,d} σ^{*i} on every forest of weight at most `max_n`
/// built from the table's decorations, for every decoration d of the table.
pub fn sigma_bplus_identity_check<S: Scalar>(table: &MellinTable<S>, max_n: u64) -> Result<bool, MellinError> {
    let decos: Vec<Decoration> = table.decorations().collect();
    let domain = TreeDomain::Decorations(decos.clone());
    let mut ev = SigmaEval::new(table);
    for f in enumerate_forests(max_n, &domain) {
        for &d in &decos {
            if !ev.sigma_bplus_holds(&f, d)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// (a*b)∘B₊ = b(1)·(a∘B₊) + a*(b∘B₊) at the forest f.
pub fn cocycle_convolution_holds<S: Scalar>(
    a: &dyn Fn(&Forest) -> S,
    b: &dyn Fn(&Forest) -> S,
    d: Decoration,
    f: &Forest,
) -> bool {
    let bp = |g: &Forest| Forest::tree(b_plus(g, d));
    let lhs = convolve(a, b, &bp(f));
    let a_b = a(&bp(f)) * &b(&Forest::empty());
    let b_after = |g: &Forest| b(&bp(g));
    let rhs = a_b + convolve(a, &b_after, f);
    lhs == rhs
}
