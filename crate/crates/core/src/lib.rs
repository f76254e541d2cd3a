//! Deterministic point sets built from polynomials modulo a prime: the
//! generalized p-sets `𝒫^{a,ε}_{d,p}`, the `(p,q)`-sets `ℒ_{p,q}` obtained from
//! Goldbach pairs, and the p²-families `𝒬^{a,ε}` and `ℛ^{a,ε}`.
//!
//! Points are exact rationals. Exponential sums over them are checked
//! exhaustively against their Weil-type bounds, and the same sums give the
//! mutual incoherence of the trigonometric sampling matrix used to recover
//! sparse trigonometric polynomials by orthogonal matching pursuit.

pub mod cli;
pub mod error;
pub mod expsum;
pub mod numtheory;
pub mod pointsets;
pub mod quadrature;
pub mod rng;
pub mod sensing;

pub use error::{Error, Result};
