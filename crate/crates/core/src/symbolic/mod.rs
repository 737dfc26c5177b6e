//! Exact polynomial algebra in the lattice variables `u_{k,j}`.
//!
//! Used to establish, rather than sample, the identities behind the
//! invariance of the Gaussian product measure: the divergence identity
//! `Σ (u_{k,j} B_{k,j} − ∂_{k,j} B_{k,j}) = 0`, `E[Lf] = 0`, and the adjoint
//! relation `E[(Lf) g] = E[f (L* g)]`.

mod generator;
mod params;
mod polynomial;
mod wick;

pub use generator::{
    apply_adjoint, apply_generator, divergence_identity, drift_polynomial, flux_polynomial, stationarity_residual,
    Generator,
};
pub use params::GeneratorParams;
pub use polynomial::{LatticePolynomial, Monomial};
pub use wick::{gaussian_expectation, gaussian_expectation_with_cap, gaussian_moment, DEFAULT_DEGREE_CAP};
