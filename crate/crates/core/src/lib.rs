//! Distances, cut times and the cut locus of the free step-two Carnot group
//! with three generators.

// NaN-rejecting guards are written as `!(x > 0.0)` on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod cli;
pub mod cutlocus;
pub mod error;
pub mod geodesics;
pub mod hamiltonian;
pub mod sampling;
pub mod scalars;
pub mod solver;
pub mod verify;
