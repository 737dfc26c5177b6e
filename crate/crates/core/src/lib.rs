//! Coupled Sasamoto-Spohn lattice models.
//!
//! The crate has two halves. The exact half ([`coefficients`], [`symbolic`])
//! represents the coupling coefficients and proves the algebraic identities
//! behind the invariance of the Gaussian product measure using polynomials
//! with arbitrary-precision rational coefficients. The numeric half
//! ([`dynamics`], [`fields`], [`stats`]) integrates the lattice SDE with
//! Euler-Maruyama, extracts fluctuation-field functionals and aggregates
//! seeded ensembles into estimates and scaling fits.

pub mod coefficients;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod rational;
pub mod seeding;
pub mod stats;
pub mod symbolic;

pub use coefficients::{GammaTensor, ModelCoefficients};
pub use error::{Error, Result};
pub use rational::Rational;
