//! Numerical radius laboratory: exact w(T) for small dense operators,
//! executable forms of numerical radius inequalities and their supporting
//! lemmas, operand generators, and a batch verification harness.

pub mod bounds;
pub mod error;
pub mod genlab;
pub mod harness;
pub mod lemmas;
pub mod matcore;
pub mod numrad;
pub mod rng;

pub use error::{RadlabError, Result};
pub use matcore::{ComplexMatrix, HermitianMatrix, C64};
