//! Circulant graphs on a prime number of vertices.
//!
//! The crate computes the arithmetic invariants of a circulant graph (its
//! connection set `S`, multiplier group `E` and type `k = |E|`), decomposes its
//! adjacency spectrum exactly in `Z[ζ_p]`, decides 2-maximality of unit
//! subgroups, and turns all of that into quantum-symmetry certificates backed
//! by exact magic-unitary witnesses.

pub mod certify;
pub mod cli;
pub mod cyclotomic;
pub mod error;
pub mod explore;
pub mod graph;
pub mod maximality;
pub mod modular;
pub mod spectral;
pub mod witness;

pub use error::{Error, Result};
