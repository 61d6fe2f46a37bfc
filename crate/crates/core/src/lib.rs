//! Exact intersection theory on resolution dual graphs of normal surface
//! singularities, together with the tree, block and ultrametric machinery
//! used to test arborescent behaviour.

pub mod bricks;
pub mod corpus;
pub mod dot;
pub mod dualgraph;
pub mod error;
pub mod lattice;
pub mod random;
pub mod rational;
pub mod treemetric;
pub mod valuation;

pub use bricks::{
    as_f_tree, block_decomposition, brick_vertex_tree, convex_hull, f_tree_isomorphic, hull_valency_report,
    tree_separates, BlockDecomposition, BlockReport, FTree, HullValencyReport, Tree,
};
pub use dualgraph::{BlowupSpec, DualGraph, GenericGraph, GraphFile};
pub use error::{Error, Result};
pub use lattice::{brackets, dual_basis, BracketTable, BranchSpec, ExcDivisor};
pub use rational::Rational;
pub use treemetric::{FiniteMetric, LogLength};
pub use valuation::{Bracket, Valuation};
