//! Lattice protein folding with variational quantum algorithms.
//!
//! Bit ordering: qubit 0 is the least-significant bit of a basis index, and
//! bitstrings are written qubit n-1 first.

pub mod analysis;
pub mod error;
pub mod hamiltonian;
pub mod lattice;
pub mod mitigation;
pub mod simulator;
pub mod solver;

pub use error::{Error, Result};
