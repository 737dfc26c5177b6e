use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::seeding::{stream_rng, INITIAL_STATE_STREAM};

/// Real array `u_{k,j}` on `ℤ_K × ℤ_M`, stored row-major by component.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeState {
    components: usize,
    sites: usize,
    values: Vec<f64>,
}

impl LatticeState {
    pub fn zeros(components: usize, sites: usize) -> Result<Self> {
        Self::constant(components, sites, 0.0)
    }

    pub fn constant(components: usize, sites: usize, c: f64) -> Result<Self> {
        check_dims(components, sites)?;
        Self::from_values(components, sites, vec![c; components * sites])
    }

    pub fn from_values(components: usize, sites: usize, values: Vec<f64>) -> Result<Self> {
        check_dims(components, sites)?;
        if values.len() != components * sites {
            return Err(Error::Dimension(format!(
                "expected {} values for K={components}, M={sites}, got {}",
                components * sites,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("lattice state has non-finite entries".into()));
        }
        Ok(Self {
            components,
            sites,
            values,
        })
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.sites..(k + 1) * self.sites]
    }

    /// `u_{k,j}` with both indices taken periodically.
    pub fn get(&self, k: isize, j: isize) -> f64 {
        let k = k.rem_euclid(self.components as isize) as usize;
        let j = j.rem_euclid(self.sites as isize) as usize;
        self.values[k * self.sites + j]
    }

    pub fn set(&mut self, k: usize, j: usize, v: f64) {
        self.values[k * self.sites + j] = v;
    }

    /// `Σ_j u_{k,j}` with compensated summation.
    pub fn component_sum(&self, k: usize) -> f64 {
        neumaier_sum(self.row(k).iter().copied())
    }

    /// `Σ_j |u_{k,j}|`, the natural scale for conservation errors of `Σ_j u_{k,j}`.
    pub fn component_abs_sum(&self, k: usize) -> f64 {
        neumaier_sum(self.row(k).iter().map(|v| v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

fn check_dims(components: usize, sites: usize) -> Result<()> {
    if components == 0 || sites == 0 {
        return Err(Error::Dimension(format!("K={components}, M={sites} must both be >= 1")));
    }
    Ok(())
}

/// A draw from the product of standard Gaussians, deterministic in `seed`.
pub fn sample_stationary(components: usize, sites: usize, seed: u64) -> Result<LatticeState> {
    check_dims(components, sites)?;
    let mut rng = stream_rng(seed, INITIAL_STATE_STREAM);
    let values = (0..components * sites).map(|_| rng.sample(StandardNormal)).collect();
    LatticeState::from_values(components, sites, values)
}

/// Kahan-Babuška-Neumaier summation.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}
