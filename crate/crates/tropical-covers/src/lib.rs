//! Exact combinatorics of tropical relative stable maps to the line.
//!
//! The crate builds the fan of the space of leaf-labeled metric trees in
//! pair-distance coordinates, refines it into the fan of rubber relative
//! stable maps for a given ramification tuple, and derives enumerative
//! output from the same combinatorial data: double Hurwitz numbers,
//! descendant invariants of the tropical line, and weighted Hurwitz
//! cycles with balancing certificates.  All arithmetic is exact; no
//! floating point is used anywhere.

pub mod error;
pub mod invariants;
pub mod json;
pub mod lattice;
pub mod moduli;
pub mod oracle;
pub mod relmaps;
pub mod trees;

pub use error::{Error, Result};
