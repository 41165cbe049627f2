//! Solvers for the discrete infinity Laplace equation `Δ∞u = f` on graphs.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dirichlet;
pub mod error;
pub mod euclid;
pub mod exhaustion;
pub mod field;
pub mod fixtures;
pub mod format;
pub mod graph;
pub mod operator;
pub mod oracle;
pub mod regularize;
pub mod tree;

pub use error::{Error, Result};
pub use field::ScalarField;
pub use graph::{BoundaryPartition, Graph, Role};
