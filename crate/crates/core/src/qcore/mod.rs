//! Linear-algebra substrate and state types.

pub mod bipartite;
pub mod json;
pub mod linalg;
pub mod state;

pub use bipartite::{entanglement_entropy, partial_trace, schmidt, BipartiteState, SchmidtDecomposition, Subsystem};
pub use linalg::{CMatrix, CVector, C64};
pub use state::{expectation, herm_inv_sqrt, pauli, BlochVector, DensityOperator, Ket, Operator};
