use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::dynamics::{check_dt, sample_stationary, steps_for_macroscopic_time, Integrator, LatticeState};
use crate::error::{Error, Result};
use crate::fields::{Functional, Probe};
use crate::seeding::derive_seed;
use crate::symbolic::GeneratorParams;

use super::accumulator::pairwise;

/// How the trajectories of an ensemble are scheduled. Results do not depend
/// on the choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Execution {
    Sequential,
    /// Rayon work stealing; runs sequentially when the `parallel` feature is off.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Sizes the global worker pool. Only the first call has an effect.
pub fn configure_threads(threads: usize) -> Result<()> {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::InvalidParameter(format!("cannot size worker pool: {e}")))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Ok(())
    }
}

/// Evaluates `f(i)` for `i < n` and returns the results in index order.
pub fn map_indices<T: Send>(n: usize, execution: Execution, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Per-trajectory samples of one scalar estimator and their summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub label: String,
    pub values: Vec<f64>,
    pub n_samples: usize,
    pub mean: f64,
    pub variance: f64,
    /// Absent below two samples.
    pub standard_error: Option<f64>,
    /// SHA-256 of the experiment description, ensemble size and base seed.
    pub fingerprint: String,
}

impl EnsembleResult {
    pub fn from_values(label: impl Into<String>, values: Vec<f64>, fingerprint: impl Into<String>) -> Self {
        let acc = pairwise(&values);
        Self {
            label: label.into(),
            n_samples: values.len(),
            mean: acc.mean(),
            variance: acc.variance(),
            standard_error: acc.standard_error(),
            values,
            fingerprint: fingerprint.into(),
        }
    }

    /// Same samples passed through `f`.
    pub fn map(&self, label: impl Into<String>, f: impl Fn(f64) -> f64) -> Self {
        Self::from_values(
            label,
            self.values.iter().map(|&v| f(v)).collect(),
            self.fingerprint.clone(),
        )
    }

    /// Samples of `|·|²`, whose mean estimates the second moment.
    pub fn squared(&self) -> Self {
        self.map(format!("{}^2", self.label), |v| v * v)
    }

    /// Concatenation of several results, fingerprints chained.
    pub fn pool(label: impl Into<String>, parts: &[&EnsembleResult]) -> Self {
        let mut hasher = Sha256::new();
        let mut values = Vec::new();
        for p in parts {
            hasher.update(p.fingerprint.as_bytes());
            values.extend_from_slice(&p.values);
        }
        Self::from_values(label, values, hex(&hasher.finalize()))
    }

    pub fn se_or_zero(&self) -> f64 {
        self.standard_error.unwrap_or(0.0)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("plain data serializes")
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn fingerprint(description: &Value, n_traj: usize, base_seed: u64) -> String {
    let mut hasher = Sha256::new();
    hasher.update(description.to_string().as_bytes());
    hasher.update(format!("|n_traj={n_traj}|base_seed={base_seed}").as_bytes());
    hex(&hasher.finalize())
}

/// A seeded family of trajectories started from the invariant measure and
/// observed through a set of functionals up to a macroscopic horizon.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub params: GeneratorParams<f64>,
    pub dt: f64,
    /// Macroscopic time `t`; the run has `round(t n²/dt)` steps.
    pub horizon: f64,
    pub stride: u64,
    pub functionals: Vec<Functional>,
}

impl Experiment {
    pub fn new(
        params: GeneratorParams<f64>,
        dt: f64,
        horizon: f64,
        stride: u64,
        functionals: Vec<Functional>,
    ) -> Result<Self> {
        check_dt(dt)?;
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "horizon must be finite and >= 0, got {horizon}"
            )));
        }
        if stride == 0 {
            return Err(Error::InvalidParameter("snapshot stride must be >= 1".into()));
        }
        Probe::new(&functionals, &params, dt)?;
        Ok(Self {
            params,
            dt,
            horizon,
            stride,
            functionals,
        })
    }

    pub fn n_steps(&self) -> u64 {
        steps_for_macroscopic_time(self.horizon, self.params.sites(), self.dt)
    }

    pub fn labels(&self) -> Vec<String> {
        self.functionals.iter().map(Functional::label).collect()
    }

    pub fn describe(&self) -> Value {
        json!({
            "params": self.params.to_json(),
            "dt": self.dt,
            "horizon": self.horizon,
            "n_steps": self.n_steps(),
            "stride": self.stride,
            "functionals": self.labels(),
        })
    }

    /// Functional values of the trajectory with seed `seed`, plus its final
    /// state.
    pub fn run_trajectory(&self, seed: u64) -> Result<(Vec<f64>, LatticeState)> {
        let mut state = sample_stationary(self.params.components(), self.params.sites(), seed)?;
        let mut integrator = Integrator::new(&self.params, self.dt)?;
        let mut probe = Probe::new(&self.functionals, &self.params, self.dt)?;
        integrator.run(&mut state, self.n_steps(), self.stride, seed, |step, s| {
            probe.observe(step, s)
        })?;
        Ok((probe.values(), state))
    }
}

/// Runs trajectory `i` with seed `derive_seed(base_seed, i)` for `i <
/// n_traj` and returns one result per functional.
pub fn run_ensemble(
    experiment: &Experiment,
    n_traj: usize,
    base_seed: u64,
    execution: Execution,
) -> Result<Vec<EnsembleResult>> {
    run_ensemble_with(
        &experiment.labels(),
        &experiment.describe(),
        n_traj,
        base_seed,
        execution,
        |_, seed| experiment.run_trajectory(seed).map(|(v, _)| v),
    )
}

/// Generic form of [`run_ensemble`]: `estimate(i, seed)` returns one value
/// per label. `description` feeds the fingerprint.
pub fn run_ensemble_with<F>(
    labels: &[String],
    description: &Value,
    n_traj: usize,
    base_seed: u64,
    execution: Execution,
    estimate: F,
) -> Result<Vec<EnsembleResult>>
where
    F: Fn(usize, u64) -> Result<Vec<f64>> + Sync + Send,
{
    if n_traj == 0 {
        return Err(Error::InvalidParameter("ensemble needs at least one trajectory".into()));
    }
    let rows = map_indices(n_traj, execution, |i| {
        estimate(i, derive_seed(base_seed, i as u64)).map_err(|e| Error::Trajectory {
            index: i,
            source: Box::new(e),
        })
    });
    let mut columns = vec![Vec::with_capacity(n_traj); labels.len()];
    for (i, row) in rows.into_iter().enumerate() {
        let row = row?;
        if row.len() != labels.len() {
            return Err(Error::Dimension(format!(
                "trajectory {i} produced {} values for {} labels",
                row.len(),
                labels.len()
            )));
        }
        for (col, v) in columns.iter_mut().zip(row) {
            col.push(v);
        }
    }
    let fp = fingerprint(description, n_traj, base_seed);
    Ok(labels
        .iter()
        .zip(columns)
        .map(|(label, values)| EnsembleResult::from_values(label.clone(), values, fp.clone()))
        .collect())
}
