//! Reverse triangle and reverse Schwarz inequalities in real and complex inner
//! product spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`space`]: vectors, inner products, orthonormal families, tolerances.
//! - [`conditions`]: hypothesis checkers and extremal parameters.
//! - [`bounds`]: bound constants, additive slacks, certificates.
//! - [`instance`]: a vector family bundled with hypothesis parameters.
//! - [`witnesses`]: explicit equality and sharpness instances.
//! - [`function_space`]: the weighted space of vector-valued functions,
//!   realised by Gauss-Legendre quadrature.
//! - [`harness`]: seeded instance generation and verification campaigns.

pub mod bounds;
pub mod conditions;
pub mod error;
pub mod function_space;
pub mod harness;
pub mod instance;
pub mod space;
pub mod witnesses;

pub use error::{Error, Result};
pub use space::{Field, OrthonormalFamily, Tolerances, Vector};
