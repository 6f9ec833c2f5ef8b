//! Exact and sampled experiments on inhomogeneous Diophantine approximation
//! sets in dimensions one and two.

pub mod analysis;
pub mod arith;
pub mod circle;
pub mod dichotomy;
pub mod dirichlet;
pub mod pins;
pub mod sets;
pub mod verify;
mod error;

pub use error::Error;
