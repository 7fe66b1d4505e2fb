//! Decorated rooted trees, plane and non-plane.
//!
//! Vertices are numbered in preorder (root 0, children left to right). An edge is
//! identified by the id of its lower endpoint, so edge ids run over `1..n`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest host tree handled by the bitmask based routines.
pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("weight must be at least 1 (byte {pos})")]
    ZeroWeight { pos: usize },
    #[error("invalid type tag {0:?}: expected 1-15 ASCII letters, digits or '_'")]
    BadTag(String),
    #[error("edge {edge} does not exist in a tree with {n} vertices")]
    BadEdge { edge: usize, n: usize },
    #[error("tree has {0} vertices, more than the supported {MAX_VERTICES}")]
    TooLarge(usize),
    #[error("malformed tree json: {0}")]
    Json(String),
}

/// Short identifier naming an equation of a system. The empty tag is the default
/// single-equation type.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeTag {
    bytes: [u8; 15],
    len: u8,
}

impl TypeTag {
    pub fn new(name: &str) -> Result<Self, TreeError> {
        let ok = name.len() <= 15 && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_');
        if !ok {
            return Err(TreeError::BadTag(name.to_string()));
        }
        let mut bytes = [0u8; 15];
        bytes[..name.len()].copy_from_slice(name.as_bytes());
        Ok(TypeTag {
            bytes,
            len: name.len() as u8,
        })
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.bytes[..self.len as usize]).expect("ascii")
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decoration {
    pub tag: TypeTag,
    pub weight: u32,
}

impl Decoration {
    pub fn new(tag: TypeTag, weight: u32) -> Self {
        assert!(weight >= 1, "decoration weight must be at least 1");
        Decoration { tag, weight }
    }

    pub fn weight(weight: u32) -> Self {
        Decoration::new(TypeTag::default(), weight)
    }
}

impl Default for Decoration {
    fn default() -> Self {
        Decoration::weight(1)
    }
}

impl fmt::Display for Decoration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tag.is_empty() {
            write!(f, "{}", self.weight)
        } else {
            write!(f, "{}:{}", self.weight, self.tag)
        }
    }
}

/// Rooted tree whose children are kept in the given order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaneTree {
    pub deco: Decoration,
    pub children: Vec<PlaneTree>,
}

/// Rooted tree up to isomorphism. Children are stored sorted, so equal values are
/// exactly the isomorphic trees and the derived order is the canonical order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootedTree {
    deco: Decoration,
    children: Vec<RootedTree>,
}

impl PlaneTree {
    pub fn new(deco: Decoration, children: Vec<PlaneTree>) -> Self {
        PlaneTree { deco, children }
    }

    pub fn vertex() -> Self {
        PlaneTree::new(Decoration::default(), Vec::new())
    }

    /// Ladder ℓ_n: a path of n unit-weight vertices.
    pub fn ladder(n: usize) -> Self {
        assert!(n >= 1);
        (1..n).fold(PlaneTree::vertex(), |t, _| {
            PlaneTree::new(Decoration::default(), vec![t])
        })
    }

    /// Corolla s_n: a root with n-1 leaf children.
    pub fn corolla(n: usize) -> Self {
        assert!(n >= 1);
        PlaneTree::new(Decoration::default(), vec![PlaneTree::vertex(); n - 1])
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(PlaneTree::size).sum::<usize>()
    }

    pub fn weight(&self) -> u64 {
        self.deco.weight as u64 + self.children.iter().map(PlaneTree::weight).sum::<u64>()
    }

    /// Decorations in preorder.
    pub fn decorations(&self) -> Vec<Decoration> {
        let mut out = Vec::new();
        self.walk(&mut |t| out.push(t.deco));
        out
    }

    fn walk<'a>(&'a self, f: &mut impl FnMut(&'a PlaneTree)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    pub fn canonicalize(&self) -> RootedTree {
        RootedTree::new(self.deco, self.children.iter().map(PlaneTree::canonicalize).collect())
    }

    /// Splits along the edge above vertex `edge` into (subtree below, rest).
    pub fn edge_split(&self, edge: usize) -> Result<(PlaneTree, PlaneTree), TreeError> {
        let flat = FlatTree::new(self)?;
        if edge == 0 || edge >= flat.len() {
            return Err(TreeError::BadEdge { edge, n: flat.len() });
        }
        let lower = flat.below(edge);
        Ok((flat.induced(lower), flat.induced(flat.all() & !lower)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TreeJson::from(self)).expect("tree serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, TreeError> {
        let j: TreeJson = serde_json::from_value(v.clone()).map_err(|e| TreeError::Json(e.to_string()))?;
        j.try_into()
    }
}

impl RootedTree {
    pub fn new(deco: Decoration, mut children: Vec<RootedTree>) -> Self {
        children.sort();
        RootedTree { deco, children }
    }

    pub fn vertex() -> Self {
        RootedTree::new(Decoration::default(), Vec::new())
    }

    pub fn deco(&self) -> Decoration {
        self.deco
    }

    pub fn children(&self) -> &[RootedTree] {
        &self.children
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(RootedTree::size).sum::<usize>()
    }

    pub fn weight(&self) -> u64 {
        self.deco.weight as u64 + self.children.iter().map(RootedTree::weight).sum::<u64>()
    }

    /// The plane tree with children in canonical order; fixes vertex and edge ids.
    pub fn to_plane(&self) -> PlaneTree {
        PlaneTree::new(self.deco, self.children.iter().map(RootedTree::to_plane).collect())
    }

    /// |Aut(t)|: product over vertices of the factorials of child multiplicities.
    pub fn aut_order(&self) -> BigUint {
        let mut acc = BigUint::one();
        let mut run = 1u32;
        for (i, c) in self.children.iter().enumerate() {
            acc *= c.aut_order();
            if i > 0 && self.children[i - 1] == *c {
                run += 1;
                acc *= run;
            } else {
                run = 1;
            }
        }
        acc
    }

    /// Number of distinct plane trees with this underlying tree.
    pub fn plane_embeddings(&self) -> BigUint {
        let mut prod = BigUint::one();
        self.fold_vertices(&mut |t| prod *= fact(t.children.len()));
        prod / self.aut_order()
    }

    /// Bijective labellings by 1..n in which every child is smaller than its parent.
    pub fn decreasing_labellings(&self) -> BigUint {
        let mut sizes = BigUint::one();
        self.fold_vertices(&mut |t| sizes *= t.size());
        fact(self.size()) / sizes
    }

    fn fold_vertices(&self, f: &mut impl FnMut(&RootedTree)) {
        f(self);
        for c in &self.children {
            c.fold_vertices(f);
        }
    }

    pub fn edge_split(&self, edge: usize) -> Result<(RootedTree, RootedTree), TreeError> {
        let (a, b) = self.to_plane().edge_split(edge)?;
        Ok((a.canonicalize(), b.canonicalize()))
    }

    /// Grafts a forest onto a new root.
    pub fn graft(deco: Decoration, forest: &[RootedTree]) -> RootedTree {
        RootedTree::new(deco, forest.to_vec())
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.to_plane().to_json()
    }
}

fn fact(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |a, i| a * i)
}

impl fmt::Display for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.deco)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_plane())
    }
}

impl std::str::FromStr for PlaneTree {
    type Err = TreeError;
    fn from_str(s: &str) -> Result<Self, TreeError> {
        parse_tree(s)
    }
}

/// Parses `tree := weight [":" tag] ["(" tree ("," tree)* ")"]`; spaces are ignored.
pub fn parse_tree(text: &str) -> Result<PlaneTree, TreeError> {
    let mut p = Parser {
        s: text.as_bytes(),
        pos: 0,
    };
    let t = p.tree()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(t)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> TreeError {
        TreeError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn tree(&mut self) -> Result<PlaneTree, TreeError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a weight"));
        }
        let digits = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
        let weight: u32 = digits.parse().map_err(|_| TreeError::Syntax {
            pos: start,
            msg: "weight out of range".into(),
        })?;
        if weight == 0 {
            return Err(TreeError::ZeroWeight { pos: start });
        }
        let mut tag = TypeTag::default();
        if self.peek() == Some(b':') {
            self.pos += 1;
            self.skip_ws();
            let ts = self.pos;
            while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
                self.pos += 1;
            }
            if ts == self.pos {
                return Err(self.err("expected a type tag after ':'"));
            }
            tag = TypeTag::new(std::str::from_utf8(&self.s[ts..self.pos]).expect("ascii"))?;
        }
        let mut children = Vec::new();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            loop {
                children.push(self.tree()?);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected ',' or ')'")),
                }
            }
        }
        Ok(PlaneTree::new(Decoration::new(tag, weight), children))
    }
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    weight: u32,
    #[serde(rename = "type", default)]
    ty: String,
    #[serde(default)]
    children: Vec<TreeJson>,
}

impl From<&PlaneTree> for TreeJson {
    fn from(t: &PlaneTree) -> Self {
        TreeJson {
            weight: t.deco.weight,
            ty: t.deco.tag.as_str().to_string(),
            children: t.children.iter().map(TreeJson::from).collect(),
        }
    }
}

impl TryFrom<TreeJson> for PlaneTree {
    type Error = TreeError;
    fn try_from(j: TreeJson) -> Result<Self, TreeError> {
        if j.weight == 0 {
            return Err(TreeError::Json("weight must be at least 1".into()));
        }
        let tag = TypeTag::new(&j.ty)?;
        let children = j
            .children
            .into_iter()
            .map(PlaneTree::try_from)
            .collect::<Result<_, _>>()?;
        Ok(PlaneTree::new(Decoration::new(tag, j.weight), children))
    }
}

/// Array view of a plane tree in preorder with subtree bitmasks.
#[derive(Clone, Debug)]
pub struct FlatTree {
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub deco: Vec<Decoration>,
    below: Vec<u64>,
}

impl FlatTree {
    pub fn new(t: &PlaneTree) -> Result<Self, TreeError> {
        let n = t.size();
        if n > MAX_VERTICES {
            return Err(TreeError::TooLarge(n));
        }
        let mut f = FlatTree {
            parent: Vec::with_capacity(n),
            children: Vec::with_capacity(n),
            deco: Vec::with_capacity(n),
            below: vec![0; n],
        };
        f.push(t, None);
        for v in (0..n).rev() {
            let mut m = 1u64 << v;
            for &c in &f.children[v] {
                m |= f.below[c];
            }
            f.below[v] = m;
        }
        Ok(f)
    }

    fn push(&mut self, t: &PlaneTree, parent: Option<usize>) -> usize {
        let id = self.parent.len();
        self.parent.push(parent);
        self.children.push(Vec::new());
        self.deco.push(t.deco);
        for c in &t.children {
            let cid = self.push(c, Some(id));
            self.children[id].push(cid);
        }
        id
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn all(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    /// Vertices of the subtree rooted at `v`.
    pub fn below(&self, v: usize) -> u64 {
        self.below[v]
    }

    /// Plane tree induced on a connected vertex set, rooted at its topmost vertex.
    pub fn induced(&self, mask: u64) -> PlaneTree {
        let root = mask.trailing_zeros() as usize;
        self.induced_at(root, mask)
    }

    fn induced_at(&self, v: usize, mask: u64) -> PlaneTree {
        let children = self.children[v]
            .iter()
            .filter(|&&c| mask >> c & 1 == 1)
            .map(|&c| self.induced_at(c, mask))
            .collect();
        PlaneTree::new(self.deco[v], children)
    }

    /// The same unrooted tree rooted at `v`. Neighbours are visited in id order.
    pub fn rerooted(&self, v: usize) -> PlaneTree {
        self.reroot_from(v, None)
    }

    fn reroot_from(&self, v: usize, from: Option<usize>) -> PlaneTree {
        let mut nbrs: Vec<usize> = self.children[v].clone();
        if let Some(p) = self.parent[v] {
            nbrs.push(p);
        }
        nbrs.sort_unstable();
        let children = nbrs
            .into_iter()
            .filter(|&u| Some(u) != from)
            .map(|u| self.reroot_from(u, Some(v)))
            .collect();
        PlaneTree::new(self.deco[v], children)
    }
}

/// Which decorations may appear during enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeDomain {
    /// Default type, weight 1 only.
    Unweighted,
    /// Any weight up to the remaining total, crossed with the given types.
    AnyWeight(Vec<TypeTag>),
    /// An explicit finite list.
    Decorations(Vec<Decoration>),
}

impl TreeDomain {
    fn candidates(&self, max_weight: u64) -> Vec<Decoration> {
        let set: BTreeSet<Decoration> = match self {
            TreeDomain::Unweighted => [Decoration::default()].into(),
            TreeDomain::AnyWeight(tags) => tags
                .iter()
                .flat_map(|&t| (1..=max_weight as u32).map(move |w| Decoration::new(t, w)))
                .collect(),
            TreeDomain::Decorations(ds) => ds.iter().copied().collect(),
        };
        set.into_iter().filter(|d| d.weight as u64 <= max_weight).collect()
    }
}

/// All plane trees of the given total weight, sorted.
pub fn enumerate_plane_trees(total_weight: u64, domain: &TreeDomain) -> Vec<PlaneTree> {
    let decos = domain.candidates(total_weight);
    let mut trees: HashMap<u64, Vec<PlaneTree>> = HashMap::new();
    let mut forests: HashMap<u64, Vec<Vec<PlaneTree>>> = HashMap::new();
    forests.insert(0, vec![Vec::new()]);
    for w in 1..=total_weight {
        let mut ts = Vec::new();
        for d in &decos {
            let dw = d.weight as u64;
            if dw > w {
                continue;
            }
            for f in &forests[&(w - dw)] {
                ts.push(PlaneTree::new(*d, f.clone()));
            }
        }
        trees.insert(w, ts);
        let mut fs = Vec::new();
        for a in 1..=w {
            for t in &trees[&a] {
                for rest in &forests[&(w - a)] {
                    let mut f = Vec::with_capacity(rest.len() + 1);
                    f.push(t.clone());
                    f.extend(rest.iter().cloned());
                    fs.push(f);
                }
            }
        }
        forests.insert(w, fs);
    }
    let mut out = trees.remove(&total_weight).unwrap_or_default();
    out.sort();
    out
}

/// One representative per isomorphism class, sorted canonically.
pub fn enumerate_rooted_trees(total_weight: u64, domain: &TreeDomain) -> Vec<RootedTree> {
    let set: BTreeSet<RootedTree> = enumerate_plane_trees(total_weight, domain)
        .iter()
        .map(PlaneTree::canonicalize)
        .collect();
    set.into_iter().collect()
}
