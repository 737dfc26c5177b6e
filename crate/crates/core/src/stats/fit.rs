use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub abscissae: Vec<f64>,
    pub ordinates: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub residual_standard_error: f64,
    pub slope_standard_error: f64,
}

impl ScalingFit {
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }

    pub fn slope_within(&self, target: f64, tolerance: f64) -> bool {
        (self.slope - target).abs() <= tolerance
    }
}

pub const MIN_FIT_POINTS: usize = 3;

pub fn scaling_fit(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidParameter(format!(
            "scaling fit needs at least {MIN_FIT_POINTS} points, got {}",
            points.len()
        )));
    }
    for w in points.windows(2) {
        if w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidParameter("abscissae must be strictly increasing".into()));
        }
    }
    if let Some(&(x, y)) = points
        .iter()
        .find(|&&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()))
    {
        return Err(Error::InvalidParameter(format!(
            "scaling fit needs finite positive points, got ({x}, {y})"
        )));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let rse = (ssr / (n - 2.0)).sqrt();
    Ok(ScalingFit {
        abscissae: points.iter().map(|p| p.0).collect(),
        ordinates: points.iter().map(|p| p.1).collect(),
        slope,
        intercept,
        residual_standard_error: rse,
        slope_standard_error: rse / sxx.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    const NS: [f64; 3] = [32.0, 64.0, 128.0];

    #[test]
    fn exact_power_laws() {
        let fit = scaling_fit(&NS.map(|n| (n, 3.7 / n))).unwrap();
        assert!((fit.slope + 1.0).abs() <= 1e-12, "{}", fit.slope);
        assert!(fit.residual_standard_error < 1e-12);
        assert!((fit.predict(256.0) - 3.7 / 256.0).abs() < 1e-12);
        let flat = scaling_fit(&NS.map(|n| (n, 0.25))).unwrap();
        assert!(flat.slope.abs() <= 1e-12);
        let sq = scaling_fit(&[(2.0, 4.0), (3.0, 9.0), (5.0, 25.0), (7.0, 49.0)]).unwrap();
        assert!((sq.slope - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(scaling_fit(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(scaling_fit(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(scaling_fit(&[(1.0, 1.0), (2.0, -1.0), (3.0, 1.0)]).is_err());
        assert!(scaling_fit(&[(1.0, 1.0), (1.0, 2.0), (3.0, 1.0)]).is_err());
        assert!(scaling_fit(&[(2.0, 1.0), (1.0, 2.0), (3.0, 1.0)]).is_err());
    }

    #[test]
    fn noisy_power_law_resamples() {
        // 5% multiplicative noise: the OLS slope has sd ≈ 0.05·√2/ln 4·… ≈ 0.04
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let pts = NS.map(|n| {
                let z: f64 = StandardNormal.sample(&mut rng);
                (n, 2.0 / n * (1.0 + 0.05 * z))
            });
            let fit = scaling_fit(&pts).unwrap();
            assert!(fit.slope_within(-1.0, 0.15), "{}", fit.slope);
        }
    }
}
