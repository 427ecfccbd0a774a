//! Unextendible maximally entangled bases in `C^d ⊗ C^d` built from partial
//! Hadamard matrices.
//!
//! * [`numerics`]: complex dense linear algebra (Gram–Schmidt, complements).
//! * [`weyl`]: shift/clock operators and the off-diagonal Weyl family `S_0`.
//! * [`hadamard`]: partial Hadamard matrices, explicit families, completion.
//! * [`feasibility`]: unimodular vectors in subspaces, unitaries in matrix
//!   subspaces.
//! * [`umeb`]: assembling and verifying the bases, existence by dimension.

pub mod error;
pub mod feasibility;
pub mod hadamard;
pub mod numerics;
pub mod umeb;
pub mod weyl;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, ComplexVector, Tolerances, C64};
