//! Random trees, tubings and chord diagrams for randomized checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::chords::ChordDiagram;
use crate::trees::{Decoration, FlatTree, PlaneTree};
use crate::tubings::Tubing;

/// Grows a plane tree in preorder: each new vertex becomes the last child of a
/// vertex on the current rightmost path.
pub fn random_plane_tree<R: Rng>(n: usize, weights: &[u32], rng: &mut R) -> PlaneTree {
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut spine = vec![0];
    for v in 1..n {
        let depth = rng.gen_range(0..spine.len());
        spine.truncate(depth + 1);
        parent.push(Some(spine[depth]));
        spine.push(v);
    }
    let decos: Vec<Decoration> = (0..n)
        .map(|_| Decoration::weight(*weights.choose(rng).expect("non-empty weight list")))
        .collect();
    fn build(v: usize, parent: &[Option<usize>], decos: &[Decoration]) -> PlaneTree {
        let kids = (0..parent.len())
            .filter(|&c| parent[c] == Some(v))
            .map(|c| build(c, parent, decos))
            .collect();
        PlaneTree::new(decos[v], kids)
    }
    build(0, &parent, &decos)
}

pub fn random_tubing<R: Rng>(host: &FlatTree, rng: &mut R) -> Tubing {
    fn go<R: Rng>(host: &FlatTree, mask: u64, rng: &mut R) -> Tubing {
        let root = mask.trailing_zeros() as usize;
        let edges: Vec<usize> = (0..host.len()).filter(|&v| v != root && mask >> v & 1 == 1).collect();
        match edges.choose(rng) {
            None => Tubing::Leaf(root),
            Some(&e) => {
                let lower = host.below(e) & mask;
                Tubing::split(e, go(host, lower, rng), go(host, mask & !lower, rng))
            }
        }
    }
    go(host, host.all(), rng)
}

pub fn random_diagram<R: Rng>(n: usize, rng: &mut R) -> ChordDiagram {
    let mut pts: Vec<usize> = (1..=2 * n).collect();
    pts.shuffle(rng);
    let pairs = pts.chunks(2).map(|p| (p[0].min(p[1]), p[0].max(p[1]))).collect();
    ChordDiagram::new(pairs).expect("perfect matching")
}

pub fn random_connected_diagram<R: Rng>(n: usize, rng: &mut R) -> ChordDiagram {
    loop {
        let c = random_diagram(n, rng);
        if c.is_connected() {
            return c;
        }
    }
}
