//! Exact finite-field realizations of hypergeometric motives.
//!
//! - [`ff`]: finite fields `F_{p^d}` with discrete-log tables
//! - [`cyclotomic`]: exact arithmetic in `Q(ζ_L)`
//! - [`characters`]: multiplicative and additive characters
//! - [`charsums`]: Jacobi, Gauss, hypergeometric and Katz sums
//! - [`pointcount`]: eigenspace point counts and Frobenius polynomials
//! - [`monodromy`]: local monodromy, rigidity, pullbacks, middle convolution
//! - [`identities`]: the transformation-identity catalog and its verifier
//!
//! Sweeps honour an [`Execution`] policy; the `parallel` feature (on by default)
//! enables the rayon backend and every policy falls back to sequential without it.

pub mod characters;
pub mod charsums;
pub mod cyclotomic;
pub mod error;
pub mod ff;
pub mod identities;
mod modular;
pub mod monodromy;
pub mod par;
pub mod pointcount;
pub mod poly;
pub mod primes;

pub use cyclotomic::{CycloNum, RootOfUnity};
pub use error::{Error, Result};
pub use ff::{make_field, Elem, FiniteField};
pub use par::Execution;
