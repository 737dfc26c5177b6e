//! Fluctuation fields, discrete calculus on test functions, and the
//! time-integrated functionals built from them.
//!
//! All times here are macroscopic: the state at macroscopic time `s` is the
//! lattice state after microscopic time `s n²`. Time integrals use the
//! trapezoidal rule over whatever snapshots the trajectory (or stream)
//! supplies.

mod calculus;
mod functional;
mod observables;
mod series;

pub use calculus::{energy, grad, laplacian, GridFunction, TestFunction};
pub use functional::{window_for_epsilon, Functional, Probe, QuadraticKernel, TimeIntegral, Weight};
pub use observables::{
    bg_integrand, block_averages, crossed_bg_integrand, fluctuation_field, forward_averages, y_integrand,
};
pub use series::{
    bg_discrepancy, crossed_bg_discrepancy, field_series, martingale_decomposition, quadratic_field, write_csv,
    y_remainder, FieldRecord, FieldSeries, FIELDS_CSV_VERSION,
};
