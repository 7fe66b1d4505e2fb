//! Line graphs of trees and A-tubings (graph-associahedron tubings).
//!
//! Vertex j of the line graph of a tree is the edge from vertex j+1 to its parent.

use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::trees::{FlatTree, PlaneTree};
use crate::tubings::{Tubing, TubingError};

/// Largest graph accepted by the exhaustive A-tubing search.
pub const MAX_ATUBING_VERTICES: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LineGraphError {
    #[error("bad graph: {0}")]
    Graph(String),
    #[error("graph has {0} vertices, the search handles at most {MAX_ATUBING_VERTICES}")]
    TooLarge(usize),
    #[error("not a maximal A-tubing of the line graph")]
    NotMaximal,
    #[error(transparent)]
    Tubing(#[from] TubingError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    adj: Vec<u64>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, LineGraphError> {
        if n > 64 {
            return Err(LineGraphError::Graph(format!("{n} vertices")));
        }
        let mut adj = vec![0u64; n];
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(LineGraphError::Graph(format!("edge ({u},{v})")));
            }
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        Ok(SimpleGraph { adj })
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        SimpleGraph::new(n, &edges).expect("path")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        SimpleGraph::new(n, &edges).expect("complete graph")
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn all(&self) -> u64 {
        if self.n() == 64 {
            u64::MAX
        } else {
            (1u64 << self.n()) - 1
        }
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .flat_map(|u| {
                (u + 1..self.n())
                    .filter(move |&v| self.adjacent(u, v))
                    .map(move |v| (u, v))
            })
            .collect()
    }

    /// Non-empty and connected as an induced subgraph.
    pub fn is_tube(&self, mask: u64) -> bool {
        if mask == 0 || mask & !self.all() != 0 {
            return false;
        }
        let mut seen = mask & mask.wrapping_neg();
        loop {
            let mut grow = seen;
            let mut m = seen;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                grow |= self.adj[v] & mask;
                m &= m - 1;
            }
            if grow == seen {
                return seen == mask;
            }
            seen = grow;
        }
    }

    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self.edges().into_iter().map(|(u, v)| json!([u, v])).collect();
        json!({ "n": self.n(), "edges": edges })
    }

    pub fn from_json(v: &Value) -> Result<Self, LineGraphError> {
        let bad = || LineGraphError::Graph(v.to_string());
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(bad)? as usize;
        let mut edges = Vec::new();
        for e in v.get("edges").and_then(Value::as_array).ok_or_else(bad)? {
            let u = e.get(0).and_then(Value::as_u64).ok_or_else(bad)? as usize;
            let w = e.get(1).and_then(Value::as_u64).ok_or_else(bad)? as usize;
            edges.push((u, w));
        }
        SimpleGraph::new(n, &edges)
    }
}

pub fn line_graph(t: &PlaneTree) -> Result<SimpleGraph, LineGraphError> {
    let host = FlatTree::new(t).map_err(|e| LineGraphError::Graph(e.to_string()))?;
    let n = host.len() - 1;
    let parent = |j: usize| host.parent[j + 1].expect("non-root");
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let (ea, eb) = ((parent(a), a + 1), (parent(b), b + 1));
            if ea.0 == eb.0 || ea.0 == eb.1 || ea.1 == eb.0 {
                edges.push((a, b));
            }
        }
    }
    SimpleGraph::new(n, &edges)
}

/// A set of tubes as bitmasks, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ATubing(Vec<u64>);

impl ATubing {
    pub fn new(mut tubes: Vec<u64>) -> Self {
        tubes.sort_unstable();
        tubes.dedup();
        ATubing(tubes)
    }

    /// From vertex lists.
    pub fn from_lists(tubes: &[Vec<usize>]) -> Self {
        ATubing::new(tubes.iter().map(|t| t.iter().fold(0u64, |m, &v| m | 1 << v)).collect())
    }

    pub fn tubes(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_lists(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.0.iter().map(|&t| bits(t)).collect();
        out.sort();
        out
    }

    pub fn to_json(&self) -> Value {
        json!(self.to_lists())
    }
}

impl fmt::Display for ATubing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lists = self.to_lists();
        let parts: Vec<String> = lists
            .iter()
            .map(|t| format!("{{{}}}", t.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn bits(mut m: u64) -> Vec<usize> {
    let mut out = Vec::new();
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// Two tubes may coexist: nested, or disjoint with a disconnected union.
fn compatible(g: &SimpleGraph, a: u64, b: u64) -> bool {
    a & !b == 0 || b & !a == 0 || (a & b == 0 && !g.is_tube(a | b))
}

pub fn is_valid_atubing(g: &SimpleGraph, tubes: &[u64]) -> bool {
    let full = g.all();
    let mut sorted = tubes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len() == tubes.len()
        && tubes.iter().all(|&t| t != full && g.is_tube(t))
        && tubes
            .iter()
            .enumerate()
            .all(|(i, &a)| tubes[i + 1..].iter().all(|&b| compatible(g, a, b)))
}

/// Valid, and no further tube can be added.
pub fn is_maximal_atubing(g: &SimpleGraph, tubes: &[u64]) -> bool {
    if !is_valid_atubing(g, tubes) {
        return false;
    }
    !proper_tubes(g)
        .into_iter()
        .any(|c| !tubes.contains(&c) && tubes.iter().all(|&t| compatible(g, c, t)))
}

fn proper_tubes(g: &SimpleGraph) -> Vec<u64> {
    (1..g.all()).filter(|&m| g.is_tube(m)).collect()
}

/// All maximal A-tubings, as maximal cliques of the tube compatibility graph.
pub fn maximal_atubings(g: &SimpleGraph) -> Result<Vec<ATubing>, LineGraphError> {
    if g.n() > MAX_ATUBING_VERTICES {
        return Err(LineGraphError::TooLarge(g.n()));
    }
    let tubes = proper_tubes(g);
    let k = tubes.len();
    let compat: Vec<Vec<bool>> = (0..k)
        .map(|i| (0..k).map(|j| i != j && compatible(g, tubes[i], tubes[j])).collect())
        .collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    bron_kerbosch(
        &compat,
        &mut chosen,
        (0..k).collect(),
        Vec::new(),
        &mut |c: &[usize]| {
            out.push(ATubing::new(c.iter().map(|&i| tubes[i]).collect()));
        },
    );
    out.sort();
    Ok(out)
}

fn bron_kerbosch(
    compat: &[Vec<bool>],
    chosen: &mut Vec<usize>,
    cand: Vec<usize>,
    excluded: Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if cand.is_empty() {
        if excluded.is_empty() {
            emit(chosen);
        }
        return;
    }
    let pivot = cand
        .iter()
        .chain(&excluded)
        .copied()
        .max_by_key(|&u| cand.iter().filter(|&&v| compat[u][v]).count())
        .expect("nonempty");
    let mut cand = cand;
    let mut excluded = excluded;
    let branch: Vec<usize> = cand.iter().copied().filter(|&v| !compat[pivot][v]).collect();
    for v in branch {
        chosen.push(v);
        let c2 = cand.iter().copied().filter(|&u| compat[v][u]).collect();
        let x2 = excluded.iter().copied().filter(|&u| compat[v][u]).collect();
        bron_kerbosch(compat, chosen, c2, x2, emit);
        chosen.pop();
        cand.retain(|&u| u != v);
        excluded.push(v);
    }
}

/// L: drop singleton tubes and the outer tube, then read each tube as its edge set.
pub fn l_map(tau: &Tubing) -> ATubing {
    let outer = tau.mask();
    ATubing::new(
        tau.tubes()
            .into_iter()
            .filter(|&t| t != outer && t.count_ones() > 1)
            .map(|t| (t & (t - 1)) >> 1)
            .collect(),
    )
}

/// L⁻¹: each tube becomes the vertices touched by its edges; the outer tube and all
/// singletons are added back.
pub fn l_inverse(t: &PlaneTree, alpha: &ATubing) -> Result<Tubing, LineGraphError> {
    let g = line_graph(t)?;
    if !is_maximal_atubing(&g, alpha.tubes()) {
        return Err(LineGraphError::NotMaximal);
    }
    let host = FlatTree::new(t).map_err(|e| LineGraphError::Graph(e.to_string()))?;
    let mut tubes: Vec<u64> = (0..host.len()).map(|v| 1u64 << v).collect();
    tubes.push(host.all());
    for &a in alpha.tubes() {
        let mut m = 0u64;
        for j in bits(a) {
            m |= 1 << (j + 1);
            m |= 1 << host.parent[j + 1].expect("non-root");
        }
        tubes.push(m);
    }
    Ok(Tubing::from_tubes(&host, &tubes)?)
}
