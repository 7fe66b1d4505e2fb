//! Binary tubings of rooted trees.
//!
//! A tubing is stored by its recursive construction: either a single vertex, or a
//! split along an edge into a tubing of the subtree below the edge (`lower`) and a
//! tubing of the remaining part containing the root (`upper`). Vertex ids are the
//! preorder ids of the host tree and tubes are bitmasks over them.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::mellin::{MellinError, MellinTable};
use crate::scalar::Scalar;
use crate::trees::{FlatTree, PlaneTree, RootedTree};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TubingError {
    #[error("malformed tubing json: {0}")]
    Json(String),
    #[error("tubing does not fit the host tree: {0}")]
    Mismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tubing {
    Leaf(usize),
    Split {
        edge: usize,
        lower: Arc<Tubing>,
        upper: Arc<Tubing>,
    },
}

impl Tubing {
    pub fn split(edge: usize, lower: Tubing, upper: Tubing) -> Tubing {
        Tubing::Split {
            edge,
            lower: Arc::new(lower),
            upper: Arc::new(upper),
        }
    }

    /// The outer tube.
    pub fn mask(&self) -> u64 {
        match self {
            Tubing::Leaf(v) => 1 << v,
            Tubing::Split { lower, upper, .. } => lower.mask() | upper.mask(),
        }
    }

    pub fn size(&self) -> usize {
        self.mask().count_ones() as usize
    }

    /// Topmost vertex of the outer tube.
    pub fn root(&self) -> usize {
        self.mask().trailing_zeros() as usize
    }

    /// All tubes, outer tube first.
    pub fn tubes(&self) -> Vec<u64> {
        let mut out = Vec::new();
        self.collect_tubes(&mut out);
        out
    }

    fn collect_tubes(&self, out: &mut Vec<u64>) {
        out.push(self.mask());
        if let Tubing::Split { lower, upper, .. } = self {
            lower.collect_tubes(out);
            upper.collect_tubes(out);
        }
    }

    /// b(τ): number of tubes rooted at the root.
    pub fn b(&self) -> usize {
        match self {
            Tubing::Leaf(_) => 1,
            Tubing::Split { upper, .. } => upper.b() + 1,
        }
    }

    /// b(v, τ) for every vertex id below 64 that occurs; absent vertices get 0.
    pub fn b_stats(&self) -> Vec<usize> {
        let n = 64 - self.mask().leading_zeros() as usize;
        let mut b = vec![0; n];
        for t in self.tubes() {
            b[t.trailing_zeros() as usize] += 1;
        }
        b
    }

    pub fn b_statistic(&self, v: usize) -> usize {
        self.tubes().iter().filter(|t| t.trailing_zeros() as usize == v).count()
    }

    /// Every split detaches a single vertex.
    pub fn is_leaf_tubing(&self) -> bool {
        match self {
            Tubing::Leaf(_) => true,
            Tubing::Split { lower, upper, .. } => matches!(**lower, Tubing::Leaf(_)) && upper.is_leaf_tubing(),
        }
    }

    pub fn containment_tree(&self) -> ContainmentTree {
        match self {
            Tubing::Leaf(v) => ContainmentTree::Leaf(*v),
            Tubing::Split { lower, upper, .. } => {
                ContainmentTree::Node(Box::new(lower.containment_tree()), Box::new(upper.containment_tree()))
            }
        }
    }

    /// Renames vertices; `map[v]` is the new id of `v`.
    pub fn relabel(&self, map: &[usize]) -> Tubing {
        match self {
            Tubing::Leaf(v) => Tubing::Leaf(map[*v]),
            Tubing::Split { edge, lower, upper } => Tubing::split(map[*edge], lower.relabel(map), upper.relabel(map)),
        }
    }

    /// Checks that this is a tubing of `host` covering every vertex.
    pub fn validate(&self, host: &FlatTree) -> Result<(), TubingError> {
        if self.mask() != host.all() {
            return Err(TubingError::Mismatch("outer tube is not the vertex set".into()));
        }
        self.validate_part(host)
    }

    fn validate_part(&self, host: &FlatTree) -> Result<(), TubingError> {
        match self {
            Tubing::Leaf(_) => Ok(()),
            Tubing::Split { edge, lower, upper } => {
                let m = self.mask();
                let (lm, um) = (lower.mask(), upper.mask());
                if lm & um != 0 || *edge >= host.len() || lm != m & host.below(*edge) {
                    return Err(TubingError::Mismatch(format!("bad split at edge {edge}")));
                }
                if host.parent[*edge].is_none_or(|p| um >> p & 1 == 0) {
                    return Err(TubingError::Mismatch(format!("edge {edge} leaves the tube")));
                }
                lower.validate_part(host)?;
                upper.validate_part(host)
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Tubing::Leaf(v) => json!({ "leaf": v }),
            Tubing::Split { edge, lower, upper } => {
                json!({ "edge": edge, "lower": lower.to_json(), "upper": upper.to_json() })
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Tubing, TubingError> {
        let bad = || TubingError::Json(v.to_string());
        if let Some(l) = v.get("leaf") {
            return Ok(Tubing::Leaf(l.as_u64().ok_or_else(bad)? as usize));
        }
        let edge = v.get("edge").and_then(Value::as_u64).ok_or_else(bad)? as usize;
        let lower = Tubing::from_json(v.get("lower").ok_or_else(bad)?)?;
        let upper = Tubing::from_json(v.get("upper").ok_or_else(bad)?)?;
        Ok(Tubing::split(edge, lower, upper))
    }

    /// Rebuilds a tubing of `host` from its full set of tubes (in any order).
    pub fn from_tubes(host: &FlatTree, tubes: &[u64]) -> Result<Tubing, TubingError> {
        let mut set = tubes.to_vec();
        set.sort_unstable();
        set.dedup();
        let t = Tubing::from_tube_set(host.all(), &set)?;
        if t.tubes().len() != set.len() {
            return Err(TubingError::Mismatch("extra tubes".into()));
        }
        t.validate(host)?;
        Ok(t)
    }

    fn from_tube_set(outer: u64, set: &[u64]) -> Result<Tubing, TubingError> {
        if set.binary_search(&outer).is_err() {
            return Err(TubingError::Mismatch(format!("missing tube {outer:#b}")));
        }
        if outer.count_ones() == 1 {
            return Ok(Tubing::Leaf(outer.trailing_zeros() as usize));
        }
        let inside: Vec<u64> = set.iter().copied().filter(|&t| t != outer && t & !outer == 0).collect();
        let maximal: Vec<u64> = inside
            .iter()
            .copied()
            .filter(|&t| !inside.iter().any(|&u| u != t && t & !u == 0))
            .collect();
        match maximal[..] {
            [a, b] if a & b == 0 && a | b == outer => {
                let (upper, lower) = if a & (outer & outer.wrapping_neg()) != 0 {
                    (a, b)
                } else {
                    (b, a)
                };
                Ok(Tubing::split(
                    lower.trailing_zeros() as usize,
                    Tubing::from_tube_set(lower, set)?,
                    Tubing::from_tube_set(upper, set)?,
                ))
            }
            _ => Err(TubingError::Mismatch(format!("tube {outer:#b} is not split in two"))),
        }
    }
}

/// Tube sets as sorted vertex lists, outer tube first.
impl fmt::Display for Tubing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut tubes = self.tubes();
        tubes.sort_by_key(|t| (std::cmp::Reverse(t.count_ones()), t.trailing_zeros(), *t));
        for (i, t) in tubes.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let vs: Vec<String> = (0..64).filter(|v| t >> v & 1 == 1).map(|v| v.to_string()).collect();
            write!(f, "{{{}}}", vs.join(","))?;
        }
        Ok(())
    }
}

/// Full binary tree of tubes; the right child holds the part with the root.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ContainmentTree {
    Leaf(usize),
    Node(Box<ContainmentTree>, Box<ContainmentTree>),
}

/// Unlabelled full binary tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinaryShape {
    Leaf,
    Node(Box<BinaryShape>, Box<BinaryShape>),
}

impl ContainmentTree {
    pub fn leaves(&self) -> usize {
        match self {
            ContainmentTree::Leaf(_) => 1,
            ContainmentTree::Node(l, r) => l.leaves() + r.leaves(),
        }
    }

    pub fn shape(&self) -> BinaryShape {
        match self {
            ContainmentTree::Leaf(_) => BinaryShape::Leaf,
            ContainmentTree::Node(l, r) => BinaryShape::Node(Box::new(l.shape()), Box::new(r.shape())),
        }
    }
}

/// All full binary trees with `n` leaves.
pub fn binary_shapes(n: usize) -> Vec<BinaryShape> {
    if n == 1 {
        return vec![BinaryShape::Leaf];
    }
    let mut out = Vec::new();
    for k in 1..n {
        for l in binary_shapes(k) {
            for r in binary_shapes(n - k) {
                out.push(BinaryShape::Node(Box::new(l.clone()), Box::new(r)));
            }
        }
    }
    out
}

/// Every tubing of `host`: edges in preorder, sub-tubings recursively.
pub fn enumerate_tubings(host: &FlatTree) -> Vec<Tubing> {
    let mut memo = HashMap::new();
    enumerate_part(host, host.all(), &mut memo)
        .iter()
        .map(|t| (**t).clone())
        .collect()
}

fn enumerate_part(host: &FlatTree, mask: u64, memo: &mut HashMap<u64, Vec<Arc<Tubing>>>) -> Vec<Arc<Tubing>> {
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    let root = mask.trailing_zeros() as usize;
    let mut out = Vec::new();
    if mask.count_ones() == 1 {
        out.push(Arc::new(Tubing::Leaf(root)));
    } else {
        for e in members(mask).filter(|&v| v != root) {
            let lm = mask & host.below(e);
            let lows = enumerate_part(host, lm, memo);
            let ups = enumerate_part(host, mask & !lm, memo);
            for lo in &lows {
                for up in &ups {
                    out.push(Arc::new(Tubing::Split {
                        edge: e,
                        lower: lo.clone(),
                        upper: up.clone(),
                    }));
                }
            }
        }
    }
    memo.insert(mask, out.clone());
    out
}

fn members(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |v| mask >> v & 1 == 1)
}

pub fn enumerate_plane_tubings(t: &PlaneTree) -> Vec<Tubing> {
    enumerate_tubings(&FlatTree::new(t).expect("tree within size limit"))
}

/// N(t) by the edge-removal recurrence, memoized on canonical forms of the parts.
#[derive(Default)]
pub struct TubingCounter {
    memo: HashMap<RootedTree, BigUint>,
}

impl TubingCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&mut self, t: &RootedTree) -> BigUint {
        if let Some(c) = self.memo.get(t) {
            return c.clone();
        }
        let plane = t.to_plane();
        let flat = FlatTree::new(&plane).expect("tree within size limit");
        let mut total = BigUint::zero();
        if flat.len() == 1 {
            total = BigUint::one();
        }
        for e in 1..flat.len() {
            let lm = flat.below(e);
            let lo = flat.induced(lm).canonicalize();
            let up = flat.induced(flat.all() & !lm).canonicalize();
            total += self.count(&lo) * self.count(&up);
        }
        self.memo.insert(t.clone(), total.clone());
        total
    }
}

pub fn count_tubings(t: &RootedTree) -> BigUint {
    TubingCounter::new().count(t)
}

/// c(τ) = ∏_{v ≠ root} c_{b(v,τ)-1, d(v)}.
pub fn mellin_monomial<S: Scalar>(tau: &Tubing, host: &FlatTree, table: &MellinTable<S>) -> Result<S, MellinError> {
    let b = tau.b_stats();
    let root = tau.root();
    let mut acc = S::one();
    for v in members(tau.mask()).filter(|&v| v != root) {
        acc = acc * table.get(b[v] - 1, host.deco[v])?;
    }
    Ok(acc)
}

/// c(τ) through the split recursion c(τ) = c_{b(τ')-1, d(rt τ')} c(τ') c(τ'').
pub fn mellin_monomial_recursive<S: Scalar>(
    tau: &Tubing,
    host: &FlatTree,
    table: &MellinTable<S>,
) -> Result<S, MellinError> {
    match tau {
        Tubing::Leaf(_) => Ok(S::one()),
        Tubing::Split { lower, upper, .. } => {
            let c = table.get(lower.b() - 1, host.deco[lower.root()])?.clone();
            Ok(c * &mellin_monomial_recursive(lower, host, table)? * &mellin_monomial_recursive(upper, host, table)?)
        }
    }
}

/// Σ_τ c(τ) grouped by b(τ): entry `b` of the result sums the tubings with b(τ) = b.
pub fn tubing_profile<S: Scalar>(host: &FlatTree, table: &MellinTable<S>) -> Result<Vec<S>, MellinError> {
    let mut memo = HashMap::new();
    profile_part(host, host.all(), table, &mut memo)
}

fn profile_part<S: Scalar>(
    host: &FlatTree,
    mask: u64,
    table: &MellinTable<S>,
    memo: &mut HashMap<u64, Vec<S>>,
) -> Result<Vec<S>, MellinError> {
    if let Some(v) = memo.get(&mask) {
        return Ok(v.clone());
    }
    let root = mask.trailing_zeros() as usize;
    let size = mask.count_ones() as usize;
    let mut out = vec![S::zero(); size + 1];
    if size == 1 {
        out[1] = S::one();
    } else {
        for e in members(mask).filter(|&v| v != root) {
            let lm = mask & host.below(e);
            let lo = profile_part(host, lm, table, memo)?;
            let mut weight = S::zero();
            for (b, c) in lo.iter().enumerate().skip(1) {
                if !c.is_zero() {
                    weight += &(c.clone() * table.get(b - 1, host.deco[e])?);
                }
            }
            if weight.is_zero() {
                continue;
            }
            let up = profile_part(host, mask & !lm, table, memo)?;
            for (b, c) in up.iter().enumerate().skip(1) {
                if !c.is_zero() {
                    out[b + 1] += &(c.clone() * &weight);
                }
            }
        }
    }
    memo.insert(mask, out.clone());
    Ok(out)
}
