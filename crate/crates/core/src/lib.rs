//! Lattice-point sums over simple lattice polytopes.
//!
//! Two independent routes compute the same sums: Brion's short rational
//! generating functions over tangent cones, and Euler-Maclaurin formulas in
//! which a Todd-type differential operator acts on the volume polynomial of a
//! facet-dilated polytope.

pub mod arith;
pub mod brion;
pub mod emops;
pub mod error;
pub mod fan;
pub mod oracle;
pub mod polytope;

pub use error::{Error, Result};
