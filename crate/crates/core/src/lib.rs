//! Symbolic engine for parametric probability networks.
//!
//! Models carry polynomial-valued probability tables over a set of real
//! parameters. Queries return exact fractional polynomials, which can then be
//! combined algebraically, optimized under the model's constraints, or
//! instantiated over discrete parameter assignments.

pub mod dsl;
pub mod embed;
pub mod error;
pub mod inference;
pub mod network;
pub mod optimize;
pub mod polynomial;
pub mod search;

pub use error::{Error, Result};
pub use polynomial::{FractionalPolynomial, Polynomial, Rational, Registry, Var};
