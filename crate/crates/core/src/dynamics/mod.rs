//! Numeric drift and Euler-Maruyama integration of the lattice SDE.

mod drift;
mod integrator;
mod state;
mod trajectory;

pub use drift::{drift_eval, flux_eval, CompiledFlux, FluxTerm};
pub use integrator::{
    check_dt, em_step, step_noise, steps_for_macroscopic_time, Integrator, Scheme, DEFAULT_DT, STABILITY_BOUND,
};
pub use state::{neumaier_sum, sample_stationary, LatticeState};
pub use trajectory::{simulate, snapshot_steps, Snapshot, Trajectory, TRAJECTORY_MAGIC, TRAJECTORY_VERSION};
