//! Binary tubings of rooted trees and the series solutions of Dyson-Schwinger
//! equations they index, with the Connes-Kreimer Hopf algebra checks, the bijection
//! to rooted connected chord diagrams and the line-graph picture of tubings.

pub mod chords;
pub mod dse;
pub mod hopf;
pub mod linegraph;
pub mod lpoly;
pub mod mellin;
pub mod sample;
pub mod scalar;
pub mod trees;
pub mod tubings;

pub use lpoly::LPoly;
pub use mellin::{LoadedTable, MellinError, MellinTable};
pub use scalar::{Poly, Rational, Scalar, Symbol};
pub use trees::{Decoration, FlatTree, PlaneTree, RootedTree, TreeDomain, TreeError, TypeTag};
pub use tubings::Tubing;
