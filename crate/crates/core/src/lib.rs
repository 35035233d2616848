//! Quantum state discrimination toolkit.
//!
//! Closed-form constructions for minimum-error discrimination (Helstrom, the
//! square-root measurement, optimality certification), unambiguous
//! discrimination (two-state and symmetric-state optima, reciprocal states,
//! an interferometer model), probabilistic entanglement concentration, and
//! the cloning / state-separation / state-estimation bounds that follow from
//! them. A seeded Monte Carlo harness samples measurement statistics so that
//! every analytic value can be checked empirically.
//!
//! All states and operators live on small dense complex spaces and are backed
//! by [`nalgebra`] matrices.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod entangle;
pub mod error;
pub mod mcsim;
pub mod minerror;
pub mod povm;
pub mod qcore;
pub mod unambiguous;

pub use error::{Error, Result};
pub use qcore::{BipartiteState, BlochVector, DensityOperator, Ket, Operator, SchmidtDecomposition, Subsystem, C64};

/// Absolute entrywise tolerance used by every invariant check unless a caller
/// supplies its own.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Eigenvalues at or below this fraction of the largest eigenvalue are treated
/// as numerical zeros by pseudo-inverses and rank decisions.
pub const PINV_CUTOFF: f64 = 1e-12;

/// Probabilities below this are treated as exactly zero.
pub const ZERO_PROB: f64 = 1e-12;
