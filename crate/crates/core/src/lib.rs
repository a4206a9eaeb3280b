//! Exact relative projection constants of subspaces of `ℓ∞ⁿ`, the zero-sum
//! amplification construction, an amplification planner, and a concrete
//! sequence-space model of a Banach–Mazur decomposition bound.

pub mod acceptance;
pub mod bm;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod minproj;
pub mod oracle;
pub mod planner;
pub mod rat;
pub mod simplex;
pub mod zero_sum;

pub use error::{Error, Result};
pub use linalg::{Mat, OpNorm, Permutation, Subspace};
pub use rat::Rat;
