use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::accumulator::pairwise;

/// `|z|` above this flags a check.
pub const Z_THRESHOLD: f64 = 4.0;

pub const MIN_GAUSSIANITY_SAMPLES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    /// 1 is the mean, 2..=4 are central moments.
    pub order: u32,
    pub empirical: f64,
    pub expected: f64,
    pub standard_error: f64,
    pub z: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianityReport {
    pub n_samples: usize,
    pub sigma2: f64,
    pub moments: Vec<MomentCheck>,
    pub passed: bool,
}

impl GaussianityReport {
    pub fn max_abs_z(&self) -> f64 {
        self.moments.iter().map(|m| m.z.abs()).fold(0.0, f64::max)
    }
}

/// Compares the mean and central moments 2..4 of `samples` with those of
/// `N(0, σ²)`, i.e. `(0, σ², 0, 3σ⁴)`.
///
/// Standard errors are the large-sample ones under the null: `σ²/N`,
/// `2σ⁴/N`, `6σ⁶/N` and `96σ⁸/N` for the four estimators.
pub fn gaussianity_check(samples: &[f64], sigma2: f64) -> Result<GaussianityReport> {
    if samples.len() < MIN_GAUSSIANITY_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "gaussianity check needs at least {MIN_GAUSSIANITY_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "reference variance must be positive, got {sigma2}"
        )));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let central = |p: i32| samples.iter().map(|x| (x - mean).powi(p)).sum::<f64>() / n;
    let s = sigma2;
    let rows = [
        (1, mean, 0.0, s),
        (2, central(2), s, 2.0 * s * s),
        (3, central(3), 0.0, 6.0 * s.powi(3)),
        (4, central(4), 3.0 * s * s, 96.0 * s.powi(4)),
    ];
    let moments: Vec<MomentCheck> = rows
        .into_iter()
        .map(|(order, empirical, expected, var)| {
            let se = (var / n).sqrt();
            let z = (empirical - expected) / se;
            MomentCheck {
                order,
                empirical,
                expected,
                standard_error: se,
                z,
                flagged: z.is_nan() || z.abs() > Z_THRESHOLD,
            }
        })
        .collect();
    Ok(GaussianityReport {
        n_samples: samples.len(),
        sigma2,
        passed: moments.iter().all(|m| !m.flagged),
        moments,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceCheck {
    pub n_samples: usize,
    pub covariance: f64,
    pub standard_error: f64,
    pub z: f64,
    pub passed: bool,
}

/// Tests `cov(x, y) = 0`, with the standard error of the sample covariance
/// estimated from the products of centred samples.
pub fn covariance_check(x: &[f64], y: &[f64]) -> Result<CovarianceCheck> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Dimension(format!(
            "covariance check needs two equal samples of size >= 2, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let products: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let acc = pairwise(&products);
    let covariance = acc.mean() * n / (n - 1.0);
    let se = acc.standard_error().unwrap_or(0.0);
    let z = if se > 0.0 { covariance / se } else { 0.0 };
    Ok(CovarianceCheck {
        n_samples: x.len(),
        covariance,
        standard_error: se,
        z,
        passed: covariance.abs() <= Z_THRESHOLD * se,
    })
}
