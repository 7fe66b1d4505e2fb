//! Rooted chord diagrams and their correspondence with tubed plane trees.
//!
//! Positions are 1-based. Chords are kept sorted by source, so chord 0 is the root
//! chord (1, b).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::dse::{DseError, GreenSeries};
use crate::lpoly::LPoly;
use crate::mellin::{MellinError, MellinTable};
use crate::scalar::{binomial, factorial, Rational, Scalar};
use crate::trees::{enumerate_plane_trees, Decoration, FlatTree, PlaneTree, TreeDomain, TypeTag};
use crate::tubings::{enumerate_tubings, Tubing};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChordError {
    #[error("malformed chord diagram: {0}")]
    Malformed(String),
    #[error("diagram is not connected")]
    Disconnected,
    #[error("diagram is not 1-terminal")]
    NotOneTerminal,
    #[error("chord expansion needs a negative integer s, got {0}")]
    BadS(String),
    #[error("tubing does not belong to the tree")]
    TubingMismatch,
    #[error(transparent)]
    Mellin(#[from] MellinError),
    #[error(transparent)]
    Dse(#[from] DseError),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChordDiagram {
    chords: Vec<(usize, usize)>,
    weights: Vec<u32>,
    at: Vec<usize>,
}

/// Class membership flags of a diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub connected: bool,
    pub decomposable: bool,
    pub noncrossing: bool,
    pub permutation: bool,
    /// Permutation diagram whose determining permutation avoids 213.
    pub avoids_213: bool,
    pub one_terminal: bool,
}

/// Intersection-order labels (1-based, per chord in source order) and the sorted
/// labels of the terminal chords.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionLabels {
    pub labels: Vec<usize>,
    pub terminals: Vec<usize>,
}

impl ChordDiagram {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self, ChordError> {
        let n = pairs.len();
        ChordDiagram::weighted(pairs, vec![1; n])
    }

    /// Chords with weights; the two lists are aligned and re-sorted together by source.
    pub fn weighted(pairs: Vec<(usize, usize)>, weights: Vec<u32>) -> Result<Self, ChordError> {
        if pairs.is_empty() {
            return Err(ChordError::Malformed("no chords".into()));
        }
        if weights.len() != pairs.len() {
            return Err(ChordError::Malformed("weights do not match chords".into()));
        }
        if weights.contains(&0) {
            return Err(ChordError::Malformed("chord weights must be at least 1".into()));
        }
        let n = pairs.len();
        let mut seen = vec![false; 2 * n + 1];
        for &(a, b) in &pairs {
            if a >= b {
                return Err(ChordError::Malformed(format!(
                    "chord ({a},{b}) must have source < sink"
                )));
            }
            for p in [a, b] {
                if p == 0 || p > 2 * n || seen[p] {
                    return Err(ChordError::Malformed(format!(
                        "endpoint {p} repeated or out of 1..{}",
                        2 * n
                    )));
                }
                seen[p] = true;
            }
        }
        let mut both: Vec<((usize, usize), u32)> = pairs.into_iter().zip(weights).collect();
        both.sort();
        let (chords, weights): (Vec<_>, Vec<_>) = both.into_iter().unzip();
        let mut at = vec![usize::MAX; 2 * n + 1];
        for (i, &(a, b)) in chords.iter().enumerate() {
            at[a] = i;
            at[b] = i;
        }
        Ok(ChordDiagram { chords, weights, at })
    }

    pub fn n(&self) -> usize {
        self.chords.len()
    }

    pub fn chords(&self) -> &[(usize, usize)] {
        &self.chords
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    /// ‖C‖: the sum of the chord weights.
    pub fn total_weight(&self) -> u64 {
        self.weights.iter().map(|&w| w as u64).sum()
    }

    pub fn with_weights(&self, weights: Vec<u32>) -> Result<Self, ChordError> {
        ChordDiagram::weighted(self.chords.clone(), weights)
    }

    /// Index of the chord with an endpoint at `pos`.
    pub fn chord_at(&self, pos: usize) -> usize {
        self.at[pos]
    }

    pub fn crosses(&self, i: usize, j: usize) -> bool {
        let (a, b) = self.chords[i];
        let (c, d) = self.chords[j];
        (a < c && c < b && b < d) || (c < a && a < d && d < b)
    }

    /// Connected components of the crossing graph restricted to `subset`, each
    /// sorted, listed by first point.
    fn components(&self, subset: &[usize]) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..subset.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for x in 0..subset.len() {
            for y in x + 1..subset.len() {
                if self.crosses(subset[x], subset[y]) {
                    let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                    parent[rx] = ry;
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (x, &c) in subset.iter().enumerate() {
            let r = find(&mut parent, x);
            groups.entry(r).or_default().push(c);
        }
        let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
        for c in &mut comps {
            c.sort_unstable();
        }
        comps.sort_by_key(|c| self.chords[c[0]].0);
        comps
    }

    pub fn is_connected(&self) -> bool {
        let all: Vec<usize> = (0..self.n()).collect();
        self.components(&all).len() == 1
    }

    /// Some proper prefix {1..2k} is a union of chords.
    pub fn is_decomposable(&self) -> bool {
        let mut reach = 0;
        for p in 1..2 * self.n() {
            reach = reach.max(self.chords[self.at[p]].1);
            if reach == p {
                return true;
            }
        }
        false
    }

    pub fn is_noncrossing(&self) -> bool {
        (0..self.n()).all(|i| (i + 1..self.n()).all(|j| !self.crosses(i, j)))
    }

    /// All sources precede all sinks.
    pub fn is_permutation(&self) -> bool {
        self.chords.iter().all(|&(a, _)| a <= self.n())
    }

    /// For permutation diagrams: the sources (ranked 1..n) read along the sinks.
    pub fn permutation(&self) -> Option<Vec<usize>> {
        if !self.is_permutation() {
            return None;
        }
        let n = self.n();
        Some((n + 1..=2 * n).map(|p| self.chords[self.at[p]].0).collect())
    }

    pub fn avoids_213(&self) -> bool {
        self.permutation().is_some_and(|p| avoids_213(&p))
    }

    /// Chord (a, b) is terminal when no chord (a', b') has a < a' < b < b'.
    pub fn terminal_flags(&self) -> Vec<bool> {
        (0..self.n())
            .map(|i| {
                let (a, b) = self.chords[i];
                !self.chords.iter().any(|&(c, d)| a < c && c < b && b < d)
            })
            .collect()
    }

    pub fn is_one_terminal(&self) -> bool {
        self.terminal_flags().iter().filter(|&&t| t).count() == 1
    }

    pub fn classify(&self) -> Classification {
        Classification {
            connected: self.is_connected(),
            decomposable: self.is_decomposable(),
            noncrossing: self.is_noncrossing(),
            permutation: self.is_permutation(),
            avoids_213: self.avoids_213(),
            one_terminal: self.is_one_terminal(),
        }
    }

    pub fn intersection_order(&self) -> Result<IntersectionLabels, ChordError> {
        if !self.is_connected() {
            return Err(ChordError::Disconnected);
        }
        let mut labels = vec![0; self.n()];
        let mut next = 1;
        let all: Vec<usize> = (0..self.n()).collect();
        self.label_component(&all, &mut labels, &mut next);
        let flags = self.terminal_flags();
        let mut terminals: Vec<usize> = (0..self.n()).filter(|&i| flags[i]).map(|i| labels[i]).collect();
        terminals.sort_unstable();
        Ok(IntersectionLabels { labels, terminals })
    }

    fn label_component(&self, comp: &[usize], labels: &mut [usize], next: &mut usize) {
        let root = comp[0];
        labels[root] = *next;
        *next += 1;
        let rest: Vec<usize> = comp[1..].to_vec();
        for c in self.components(&rest) {
            self.label_component(&c, labels, next);
        }
    }

    fn to_labeled(&self) -> Vec<(usize, usize, usize)> {
        self.chords.iter().enumerate().map(|(i, &(a, b))| (a, b, i)).collect()
    }

    pub fn to_json(&self) -> Value {
        let chords: Vec<Value> = self.chords.iter().map(|&(a, b)| json!([a, b])).collect();
        json!({ "n": self.n(), "chords": chords, "weights": self.weights })
    }

    pub fn from_json(v: &Value) -> Result<Self, ChordError> {
        let bad = || ChordError::Malformed(v.to_string());
        let chords = v.get("chords").and_then(Value::as_array).ok_or_else(bad)?;
        let mut pairs = Vec::new();
        for c in chords {
            let a = c.get(0).and_then(Value::as_u64).ok_or_else(bad)? as usize;
            let b = c.get(1).and_then(Value::as_u64).ok_or_else(bad)? as usize;
            pairs.push((a, b));
        }
        if let Some(n) = v.get("n").and_then(Value::as_u64) {
            if n as usize != pairs.len() {
                return Err(ChordError::Malformed("n does not match the chord count".into()));
            }
        }
        let weights = match v.get("weights") {
            Some(w) => w
                .as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|x| x.as_u64().map(|x| x as u32).ok_or_else(bad))
                .collect::<Result<Vec<_>, _>>()?,
            None => vec![1; pairs.len()],
        };
        ChordDiagram::weighted(pairs, weights)
    }
}

impl fmt::Display for ChordDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in &self.chords {
            write!(f, "({a},{b})")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for ChordDiagram {
    type Err = ChordError;

    /// Reads "(1,4)(2,8)(3,5)...".
    fn from_str(s: &str) -> Result<Self, ChordError> {
        let bad = |m: &str| ChordError::Malformed(format!("{m} in {s:?}"));
        let mut pairs = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
            let close = body.find(')').ok_or_else(|| bad("missing ')'"))?;
            let (a, b) = body[..close].split_once(',').ok_or_else(|| bad("expected 'a,b'"))?;
            let a = a.trim().parse().map_err(|_| bad("bad endpoint"))?;
            let b = b.trim().parse().map_err(|_| bad("bad endpoint"))?;
            pairs.push((a, b));
            rest = body[close + 1..].trim_start();
        }
        ChordDiagram::new(pairs)
    }
}

/// No i < j < k with p_j < p_i < p_k.
pub fn avoids_213(p: &[usize]) -> bool {
    let n = p.len();
    for j in 1..n {
        for i in 0..j {
            if p[j] < p[i] && p[j + 1..].iter().any(|&x| x > p[i]) {
                return false;
            }
        }
    }
    true
}

/// Every rooted chord diagram with `n` chords, sorted.
pub fn enumerate_diagrams(n: usize) -> Vec<ChordDiagram> {
    let mut out = Vec::new();
    let mut free: Vec<usize> = (1..=2 * n).collect();
    let mut cur = Vec::new();
    matchings(&mut free, &mut cur, &mut out);
    out.sort();
    out
}

fn matchings(free: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<ChordDiagram>) {
    if free.is_empty() {
        out.push(ChordDiagram::new(cur.clone()).expect("perfect matching"));
        return;
    }
    let a = free.remove(0);
    for j in 0..free.len() {
        let b = free.remove(j);
        cur.push((a, b));
        matchings(free, cur, out);
        cur.pop();
        free.insert(j, b);
    }
    free.insert(0, a);
}

/// Connected rooted chord diagrams with `n` chords, sorted.
pub fn enumerate_connected_diagrams(n: usize) -> Vec<ChordDiagram> {
    enumerate_diagrams(n)
        .into_iter()
        .filter(ChordDiagram::is_connected)
        .collect()
}

/// A chord diagram together with the tree vertex each chord corresponds to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TubedDiagram {
    pub diagram: ChordDiagram,
    /// `vertex[i]` is the preorder id of the vertex matching chord i.
    pub vertex: Vec<usize>,
}

/// 1-based index of insertion place (u, pos) of the plane tree induced on `mask`.
/// The places of a vertex with k children are (v, 0), places of child 1, (v, 1),
/// ..., places of child k, (v, k).
fn rtip_index(host: &FlatTree, mask: u64, u: usize, pos: usize) -> usize {
    fn walk(host: &FlatTree, mask: u64, v: usize, target: (usize, usize), counter: &mut usize) -> Option<usize> {
        let kids: Vec<usize> = host.children[v]
            .iter()
            .copied()
            .filter(|&c| mask >> c & 1 == 1)
            .collect();
        for j in 0..=kids.len() {
            *counter += 1;
            if (v, j) == target {
                return Some(*counter);
            }
            if j < kids.len() {
                if let Some(r) = walk(host, mask, kids[j], target, counter) {
                    return Some(r);
                }
            }
        }
        None
    }
    let mut counter = 0;
    walk(host, mask, mask.trailing_zeros() as usize, (u, pos), &mut counter).expect("place exists")
}

/// θ: tubings of plane trees to connected chord diagrams; chords carry vertex weights.
pub fn theta(tree: &PlaneTree, tau: &Tubing) -> Result<TubedDiagram, ChordError> {
    let host = FlatTree::new(tree).map_err(|_| ChordError::TubingMismatch)?;
    tau.validate(&host).map_err(|_| ChordError::TubingMismatch)?;
    let raw = theta_rec(&host, tau);
    let mut sorted = raw.clone();
    sorted.sort();
    let pairs = sorted.iter().map(|&(a, b, _)| (a, b)).collect();
    let weights = sorted.iter().map(|&(_, _, v)| host.deco[v].weight).collect();
    let vertex = sorted.iter().map(|&(_, _, v)| v).collect();
    Ok(TubedDiagram {
        diagram: ChordDiagram::weighted(pairs, weights)?,
        vertex,
    })
}

fn theta_rec(host: &FlatTree, tau: &Tubing) -> Vec<(usize, usize, usize)> {
    match tau {
        Tubing::Leaf(v) => vec![(1, 2, *v)],
        Tubing::Split { edge, lower, upper } => {
            let upper_c = theta_rec(host, upper);
            let lower_c = theta_rec(host, lower);
            let um = upper.mask();
            let u = host.parent[*edge].expect("edge has a parent");
            let pos = host.children[u]
                .iter()
                .take_while(|&&c| c != *edge)
                .filter(|&&c| um >> c & 1 == 1)
                .count();
            let i = rtip_index(host, um, u, pos);
            let m = lower_c.len();
            let shift = |p: usize| if p <= i { p + 1 } else { p + 2 * m };
            let mut out = Vec::with_capacity(upper_c.len() + m);
            for &(a, b, v) in &lower_c {
                if a == 1 {
                    out.push((1, b + i, v));
                } else {
                    out.push((a + i, b + i, v));
                }
            }
            for &(a, b, v) in &upper_c {
                out.push((shift(a), shift(b), v));
            }
            out
        }
    }
}

/// Plane tree whose vertices are chord ids.
#[derive(Clone, Debug)]
struct IdTree {
    id: usize,
    children: Vec<IdTree>,
}

impl IdTree {
    /// Inserts `sub` at the `i`-th insertion place (1-based).
    fn insert_at(&mut self, i: usize, sub: IdTree) {
        fn go(t: &mut IdTree, i: usize, counter: &mut usize, sub: &mut Option<IdTree>) -> bool {
            let k = t.children.len();
            for j in 0..=k {
                *counter += 1;
                if *counter == i {
                    t.children.insert(j, sub.take().expect("inserted once"));
                    return true;
                }
                if j < k && go(&mut t.children[j], i, counter, sub) {
                    return true;
                }
            }
            false
        }
        let mut counter = 0;
        let mut slot = Some(sub);
        assert!(go(self, i, &mut counter, &mut slot), "insertion place {i} out of range");
    }

    fn preorder(&self, out: &mut Vec<usize>) {
        out.push(self.id);
        for c in &self.children {
            c.preorder(out);
        }
    }

    fn to_plane(&self, weights: &[u32]) -> PlaneTree {
        PlaneTree::new(
            Decoration::new(TypeTag::default(), weights[self.id]),
            self.children.iter().map(|c| c.to_plane(weights)).collect(),
        )
    }
}

/// Relabels positions to 1..2n keeping their order.
fn standardize(chords: &[(usize, usize, usize)]) -> Vec<(usize, usize, usize)> {
    let mut pos: Vec<usize> = chords.iter().flat_map(|&(a, b, _)| [a, b]).collect();
    pos.sort_unstable();
    let rank: BTreeMap<usize, usize> = pos.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
    chords.iter().map(|&(a, b, id)| (rank[&a], rank[&b], id)).collect()
}

/// A chord (left, right, id) whose id survives standardization.
type Labelled = (usize, usize, usize);

/// Splits a connected labelled diagram (standardized, n ≥ 2) into (C', C'', i):
/// C'' is the component of C minus the root chord holding position 2, C' is the
/// root chord with everything else and i is the insertion place of C' in C''.
fn decompose(chords: &[Labelled]) -> (Vec<Labelled>, Vec<Labelled>, usize) {
    let d = ChordDiagram::new(chords.iter().map(|&(a, b, _)| (a, b)).collect()).expect("valid diagram");
    let by_pos: BTreeMap<(usize, usize), usize> = chords.iter().map(|&(a, b, id)| ((a, b), id)).collect();
    let rest: Vec<usize> = (1..d.n()).collect();
    let outer_idx = d.chord_at(2);
    let comps = d.components(&rest);
    let outer: BTreeSet<usize> = comps
        .into_iter()
        .find(|c| c.contains(&outer_idx))
        .expect("component")
        .into_iter()
        .collect();
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    for (i, &(a, b)) in d.chords().iter().enumerate() {
        let entry = (a, b, by_pos[&(a, b)]);
        if outer.contains(&i) {
            c2.push(entry);
        } else {
            c1.push(entry);
        }
    }
    let eta = c1
        .iter()
        .flat_map(|&(a, b, _)| [a, b])
        .filter(|&p| p > 1)
        .min()
        .expect("root chord has a sink");
    (standardize(&c1), standardize(&c2), eta - 2)
}

fn mu_rec(chords: &[(usize, usize, usize)]) -> (IdTree, Tubing) {
    if chords.len() == 1 {
        let id = chords[0].2;
        return (
            IdTree {
                id,
                children: Vec::new(),
            },
            Tubing::Leaf(id),
        );
    }
    let (c1, c2, i) = decompose(chords);
    let (t1, tau1) = mu_rec(&c1);
    let (mut t2, tau2) = mu_rec(&c2);
    let edge = t1.id;
    t2.insert_at(i, t1);
    (t2, Tubing::split(edge, tau1, tau2))
}

/// μ = θ⁻¹. Returns the tubed plane tree with preorder vertex ids and, per chord,
/// its vertex.
pub fn mu(c: &ChordDiagram) -> Result<(PlaneTree, Tubing, Vec<usize>), ChordError> {
    if !c.is_connected() {
        return Err(ChordError::Disconnected);
    }
    let (t, tau) = mu_rec(&c.to_labeled());
    let mut order = Vec::new();
    t.preorder(&mut order);
    let mut vertex = vec![0; c.n()];
    for (new, &old) in order.iter().enumerate() {
        vertex[old] = new;
    }
    Ok((t.to_plane(c.weights()), tau.relabel(&vertex), vertex))
}

/// Auxiliary full binary tree; leaves are chord ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuxTree {
    Leaf(usize),
    Node(Box<AuxTree>, Box<AuxTree>),
}

impl AuxTree {
    fn count(&self) -> usize {
        match self {
            AuxTree::Leaf(_) => 1,
            AuxTree::Node(l, r) => 1 + l.count() + r.count(),
        }
    }

    /// T1 ∘_k T2: a new vertex is put above vertex k (preorder, 1-based) of T2 with
    /// the old subtree at k as right child and T1 as left child.
    pub fn insert(t1: AuxTree, k: usize, t2: AuxTree) -> AuxTree {
        fn go(t: AuxTree, k: usize, counter: &mut usize, t1: &mut Option<AuxTree>) -> AuxTree {
            *counter += 1;
            if *counter == k {
                let left = t1.take().expect("inserted once");
                *counter += t.count() - 1;
                return AuxTree::Node(Box::new(left), Box::new(t));
            }
            match t {
                AuxTree::Leaf(_) => t,
                AuxTree::Node(l, r) => {
                    let l = go(*l, k, counter, t1);
                    let r = go(*r, k, counter, t1);
                    AuxTree::Node(Box::new(l), Box::new(r))
                }
            }
        }
        assert!(k >= 1 && k <= t2.count(), "insertion index {k} out of range");
        let mut slot = Some(t1);
        go(t2, k, &mut 0, &mut slot)
    }

    /// For each leaf, the number of steps up while the current vertex is a right child.
    fn branch_left(&self, out: &mut BTreeMap<usize, usize>, path: &mut Vec<bool>) {
        match self {
            AuxTree::Leaf(id) => {
                let run = path.iter().rev().take_while(|&&right| right).count();
                out.insert(*id, run);
            }
            AuxTree::Node(l, r) => {
                path.push(false);
                l.branch_left(out, path);
                path.pop();
                path.push(true);
                r.branch_left(out, path);
                path.pop();
            }
        }
    }
}

fn aux_rec(chords: &[(usize, usize, usize)]) -> AuxTree {
    if chords.len() == 1 {
        return AuxTree::Leaf(chords[0].2);
    }
    let (c1, c2, i) = decompose(chords);
    AuxTree::insert(aux_rec(&c1), i, aux_rec(&c2))
}

pub fn aux_tree(c: &ChordDiagram) -> Result<AuxTree, ChordError> {
    if !c.is_connected() {
        return Err(ChordError::Disconnected);
    }
    Ok(aux_rec(&c.to_labeled()))
}

/// ν(a) for every chord, in source order.
pub fn nu(c: &ChordDiagram) -> Result<Vec<usize>, ChordError> {
    let t = aux_tree(c)?;
    let mut out = BTreeMap::new();
    t.branch_left(&mut out, &mut Vec::new());
    Ok(out.into_values().collect())
}

/// Checks the terminal-chord dictionary for θ(τ): the first terminal chord is the
/// root, b(τ) = t₁, terminal chords are the root and the roots of tubes of size at
/// least two, and b(v_i, τ) - 1 = t_i - t_{i-1}.
pub fn terminal_correspondence_check(tree: &PlaneTree, tau: &Tubing) -> Result<bool, ChordError> {
    let img = theta(tree, tau)?;
    let io = img.diagram.intersection_order()?;
    let flags = img.diagram.terminal_flags();
    let b = tau.b_stats();
    let mut by_label: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &l) in io.labels.iter().enumerate() {
        by_label.insert(l, img.vertex[i]);
    }
    let t1 = io.terminals[0];
    if by_label[&t1] != 0 || tau.b() != t1 {
        return Ok(false);
    }
    let mut want: BTreeSet<usize> = tau
        .tubes()
        .iter()
        .filter(|t| t.count_ones() >= 2)
        .map(|t| t.trailing_zeros() as usize)
        .collect();
    want.insert(0);
    let got: BTreeSet<usize> = (0..flags.len()).filter(|&i| flags[i]).map(|i| img.vertex[i]).collect();
    if want != got {
        return Ok(false);
    }
    for w in io.terminals.windows(2) {
        if b[by_label[&w[1]]] - 1 != w[1] - w[0] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// c(C) = ∏_{i ≥ 2} c_{t_i - t_{i-1}, w(t_i)} ∏_{a not terminal} c_{0, w(a)}.
pub fn diagram_monomial<S: Scalar>(c: &ChordDiagram, table: &MellinTable<S>) -> Result<S, ChordError> {
    let io = c.intersection_order()?;
    let flags = c.terminal_flags();
    let mut chord_of = vec![0; c.n() + 1];
    for (i, &l) in io.labels.iter().enumerate() {
        chord_of[l] = i;
    }
    let deco = |i: usize| Decoration::weight(c.weights()[i]);
    let mut acc = S::one();
    for w in io.terminals.windows(2) {
        acc = acc * table.get(w[1] - w[0], deco(chord_of[w[1]]))?;
    }
    for (i, &terminal) in flags.iter().enumerate() {
        if !terminal {
            acc = acc * table.get(0, deco(i))?;
        }
    }
    Ok(acc)
}

/// One diagram's term: ∏_a binom(1 + w(a)s, ν(a)) c(C) Σ_{k=1}^{t₁} L^k/k! c_{t₁-k, w(t₁)}.
pub fn diagram_term<S: Scalar>(c: &ChordDiagram, s: &Rational, table: &MellinTable<S>) -> Result<LPoly<S>, ChordError> {
    let nus = nu(c)?;
    let mut pre = Rational::one();
    for (i, &v) in nus.iter().enumerate() {
        let top = Rational::one() + s * Rational::from_integer(c.weights()[i].into());
        pre *= binomial(&top, v);
    }
    if pre.is_zero() {
        return Ok(LPoly::zero());
    }
    let io = c.intersection_order()?;
    let t1 = io.terminals[0];
    let first = io.labels.iter().position(|&l| l == t1).expect("label present");
    let d = Decoration::weight(c.weights()[first]);
    let mono = diagram_monomial(c, table)?;
    let mut root = vec![S::zero(); t1 + 1];
    for (k, slot) in root.iter_mut().enumerate().skip(1) {
        let inv = Rational::new(1.into(), factorial(k));
        *slot = table.get(t1 - k, d)?.scale(&inv);
    }
    Ok(LPoly::new(root).mul_scalar(&mono).scale(&pre))
}

/// Weighted connected diagrams with total weight at most `max_weight`, chord
/// weights drawn from `weights`.
pub fn enumerate_weighted_connected(max_weight: usize, weights: &[u32]) -> Vec<ChordDiagram> {
    let mut out = Vec::new();
    let min_w = weights.iter().copied().min().unwrap_or(1).max(1) as usize;
    for n in 1..=max_weight / min_w {
        for c in enumerate_connected_diagrams(n) {
            let mut cur = Vec::with_capacity(n);
            assign_weights(&c, weights, max_weight, &mut cur, &mut out);
        }
    }
    out
}

fn assign_weights(c: &ChordDiagram, weights: &[u32], budget: usize, cur: &mut Vec<u32>, out: &mut Vec<ChordDiagram>) {
    if cur.len() == c.n() {
        out.push(c.with_weights(cur.clone()).expect("weights fit"));
        return;
    }
    let left = c.n() - cur.len() - 1;
    let min_w = weights.iter().copied().min().unwrap_or(1) as usize;
    for &w in weights {
        if (w as usize) + left * min_w <= budget {
            cur.push(w);
            assign_weights(c, weights, budget - w as usize, cur, out);
            cur.pop();
        }
    }
}

/// The chord diagram expansion of the single-equation solution for negative integer s.
pub fn chord_expansion<S: Scalar>(
    s: &Rational,
    table: &MellinTable<S>,
    order: usize,
) -> Result<GreenSeries<S>, ChordError> {
    if !s.is_integer() || *s >= Rational::zero() {
        return Err(ChordError::BadS(s.to_string()));
    }
    if order == 0 {
        return Err(DseError::ZeroOrder.into());
    }
    table.require_len(order)?;
    let tags: BTreeSet<TypeTag> = table.decorations().map(|d| d.tag).collect();
    if tags.len() != 1 {
        return Err(DseError::Spec("a single equation needs exactly one decoration type".into()).into());
    }
    let weights: Vec<u32> = table
        .decorations()
        .map(|d| d.weight)
        .filter(|&w| w as usize <= order)
        .collect();
    let mut terms = vec![LPoly::zero(); order];
    for c in enumerate_weighted_connected(order, &weights) {
        let t = diagram_term(&c, s, table)?;
        terms[c.total_weight() as usize - 1] += &t;
    }
    Ok(GreenSeries::new(terms))
}

/// Ordered tree with vertex labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelledTree {
    pub label: usize,
    pub children: Vec<LabelledTree>,
}

impl LabelledTree {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(LabelledTree::size).sum::<usize>()
    }

    /// Every child carries a smaller label than its parent.
    pub fn is_decreasing(&self) -> bool {
        self.children.iter().all(|c| c.label < self.label && c.is_decreasing())
    }

    pub fn is_corolla(&self) -> bool {
        self.children.iter().all(|c| c.children.is_empty())
    }

    pub fn shape(&self) -> PlaneTree {
        PlaneTree::new(
            Decoration::default(),
            self.children.iter().map(LabelledTree::shape).collect(),
        )
    }
}

/// κ: children of chord i (in source order) are the chords of its sink group, the
/// maximal run of sinks right after its source, in sink order.
pub fn kappa(c: &ChordDiagram) -> Result<LabelledTree, ChordError> {
    if !c.is_one_terminal() {
        return Err(ChordError::NotOneTerminal);
    }
    let n = c.n();
    let mut kids: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut has_parent = vec![false; n];
    for (i, &(a, _)) in c.chords().iter().enumerate() {
        let mut p = a + 1;
        while p <= 2 * n {
            let j = c.chord_at(p);
            if c.chords()[j].1 != p {
                break;
            }
            if j != i {
                kids[i].push(j);
                has_parent[j] = true;
            }
            p += 1;
        }
    }
    let roots: Vec<usize> = (0..n).filter(|&i| !has_parent[i]).collect();
    if roots.len() != 1 {
        return Err(ChordError::Malformed("sink groups do not form a tree".into()));
    }
    fn build(i: usize, kids: &[Vec<usize>]) -> LabelledTree {
        LabelledTree {
            label: i + 1,
            children: kids[i].iter().map(|&j| build(j, kids)).collect(),
        }
    }
    Ok(build(roots[0], &kids))
}

/// The Yukawa map d: non-crossing indecomposable diagrams to plane trees, children
/// being the outermost chords nested directly inside a chord.
pub fn yukawa_tree(c: &ChordDiagram) -> Option<PlaneTree> {
    if !c.is_noncrossing() || c.is_decomposable() {
        return None;
    }
    fn build(c: &ChordDiagram, i: usize) -> PlaneTree {
        let (a, b) = c.chords()[i];
        let mut children = Vec::new();
        let mut p = a + 1;
        while p < b {
            let j = c.chord_at(p);
            children.push(build(c, j));
            p = c.chords()[j].1 + 1;
        }
        PlaneTree::new(Decoration::default(), children)
    }
    Some(build(c, 0))
}

/// Every tubing of every unweighted plane tree with `n` vertices.
pub fn tubed_plane_trees(n: usize) -> Vec<(PlaneTree, Tubing)> {
    let mut out = Vec::new();
    for t in enumerate_plane_trees(n as u64, &TreeDomain::Unweighted) {
        let flat = FlatTree::new(&t).expect("small tree");
        for tau in enumerate_tubings(&flat) {
            out.push((t.clone(), tau));
        }
    }
    out
}

/// Outcome of the class correspondences at one size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassReport {
    pub n: usize,
    pub ladder_tubings: usize,
    pub ladder_image_matches: bool,
    pub leaf_tubings: usize,
    pub one_terminal: usize,
    pub leaf_image_matches: bool,
}

/// θ(tubings of ℓ_n) = connected 213-avoiding permutation diagrams and
/// θ(leaf tubings) = 1-terminal diagrams, both as sets.
pub fn special_class_check(n: usize) -> Result<ClassReport, ChordError> {
    let connected = enumerate_connected_diagrams(n);
    let ladder = PlaneTree::ladder(n);
    let ladder_img: BTreeSet<ChordDiagram> = enumerate_tubings(&FlatTree::new(&ladder).expect("small"))
        .iter()
        .map(|tau| theta(&ladder, tau).map(|d| d.diagram))
        .collect::<Result<_, _>>()?;
    let perm213: BTreeSet<ChordDiagram> = connected.iter().filter(|c| c.avoids_213()).cloned().collect();
    let mut leaf_img = BTreeSet::new();
    let mut leaf_count = 0;
    for (t, tau) in tubed_plane_trees(n) {
        if tau.is_leaf_tubing() {
            leaf_count += 1;
            leaf_img.insert(theta(&t, &tau)?.diagram);
        }
    }
    let one_term: BTreeSet<ChordDiagram> = connected.iter().filter(|c| c.is_one_terminal()).cloned().collect();
    Ok(ClassReport {
        n,
        ladder_tubings: ladder_img.len(),
        ladder_image_matches: ladder_img == perm213,
        leaf_tubings: leaf_count,
        one_terminal: one_term.len(),
        leaf_image_matches: leaf_img == one_term && leaf_count == one_term.len(),
    })
}
