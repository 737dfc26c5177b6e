use crate::dynamics::LatticeState;
use crate::error::{Error, Result};

use super::calculus::GridFunction;

pub(crate) fn check_grid(state: &LatticeState, n: usize) -> Result<()> {
    if state.sites() != n {
        return Err(Error::Dimension(format!(
            "fields need M = n, got M = {} and n = {n}",
            state.sites()
        )));
    }
    Ok(())
}

fn check_component(state: &LatticeState, k: usize) -> Result<()> {
    if k >= state.components() {
        return Err(Error::InvalidParameter(format!(
            "component {k} out of range for K = {}",
            state.components()
        )));
    }
    Ok(())
}

/// `𝒳^n_k(φ) = n^{-1/2} Σ_j u_{k,j} φ_j`.
pub fn fluctuation_field(state: &LatticeState, phi: &GridFunction, k: usize) -> Result<f64> {
    check_grid(state, phi.n)?;
    check_component(state, k)?;
    Ok(pair(state.row(k), &phi.values) / (phi.n as f64).sqrt())
}

pub(crate) fn pair(u: &[f64], w: &[f64]) -> f64 {
    u.iter().zip(w).map(|(a, b)| a * b).sum()
}

/// Forward and backward window means at one site:
/// `→u^l_{k,j} = (1/l) Σ_{q=1}^{l} u_{k,j+q}` and `←u^l_{k,j} = (1/l) Σ_{q=0}^{l−1} u_{k,j−q}`.
pub fn block_averages(state: &LatticeState, k: usize, j: usize, l: usize) -> Result<(f64, f64)> {
    check_component(state, k)?;
    check_window(l, state.sites(), state.sites())?;
    let (k, j) = (k as isize, j as isize);
    let forward: f64 = (1..=l as isize).map(|q| state.get(k, j + q)).sum::<f64>() / l as f64;
    let backward: f64 = (1..=l as isize).map(|q| state.get(k, j - l as isize + q)).sum::<f64>() / l as f64;
    Ok((forward, backward))
}

pub(crate) fn check_window(l: usize, m: usize, max: usize) -> Result<()> {
    if l == 0 || l > max {
        return Err(Error::InvalidParameter(format!(
            "block length l = {l} outside 1..={max} (M = {m})"
        )));
    }
    Ok(())
}

/// `→u^l_{k,j}` for all `j` of one row. The backward mean is the same array
/// shifted, `←u^l_{k,j} = →u^l_{k,j−l}`, so both are summed in one order.
pub fn forward_averages(row: &[f64], l: usize) -> Vec<f64> {
    let m = row.len();
    let inv = l as f64;
    (0..m)
        .map(|j| {
            let mut s = 0.0;
            for q in 1..=l {
                s += row[(j + q) % m];
            }
            s / inv
        })
        .collect()
}

/// Integrand of the diagonal discrepancy, `Σ_j w_j (u_j u_{j+1} − ←u^l_j →u^l_j)`.
pub fn bg_integrand(row: &[f64], forward: &[f64], l: usize, weight: &[f64]) -> f64 {
    let m = row.len();
    (0..m)
        .map(|j| {
            let back = forward[(j + m - l % m) % m];
            weight[j] * (row[j] * row[(j + 1) % m] - back * forward[j])
        })
        .sum()
}

/// Integrand of the crossed discrepancy,
/// `Σ_j w_j (u_{k,j} u_{k̄,j} − →u^l_{k,j−1} →u^l_{k̄,j−1})`.
pub fn crossed_bg_integrand(row: &[f64], row_bar: &[f64], fwd: &[f64], fwd_bar: &[f64], weight: &[f64]) -> f64 {
    let m = row.len();
    (0..m)
        .map(|j| {
            let p = (j + m - 1) % m;
            weight[j] * (row[j] * row_bar[j] - fwd[p] * fwd_bar[p])
        })
        .sum()
}

/// Integrand of the remainder, `Σ_j w_j (u_j u_{j+1} − u_j² + 1)`.
pub fn y_integrand(row: &[f64], weight: &[f64]) -> f64 {
    let m = row.len();
    (0..m)
        .map(|j| weight[j] * (row[j] * row[(j + 1) % m] - row[j] * row[j] + 1.0))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::sample_stationary;
    use crate::fields::TestFunction;

    #[test]
    fn field_examples() {
        let one = TestFunction::Constant(1.0).on_grid(4).unwrap();
        let s = LatticeState::constant(1, 4, 1.0).unwrap();
        assert!((fluctuation_field(&s, &one, 0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(
            fluctuation_field(&LatticeState::zeros(1, 4).unwrap(), &one, 0).unwrap(),
            0.0
        );
        assert!(fluctuation_field(&LatticeState::zeros(1, 5).unwrap(), &one, 0).is_err());
        assert!(fluctuation_field(&s, &one, 1).is_err());
    }

    #[test]
    fn window_examples() {
        let s = LatticeState::from_values(1, 5, vec![1., 2., 3., 4., 5.]).unwrap();
        assert_eq!(block_averages(&s, 0, 2, 1).unwrap(), (4.0, 3.0));
        assert_eq!(block_averages(&s, 0, 4, 2).unwrap(), (1.5, 4.5));
        assert!(block_averages(&s, 0, 0, 0).is_err());
        assert!(block_averages(&s, 0, 0, 6).is_err());
        let c = LatticeState::constant(2, 6, -0.75).unwrap();
        assert_eq!(block_averages(&c, 1, 3, 3).unwrap(), (-0.75, -0.75));

        let fwd = forward_averages(s.row(0), 2);
        for j in 0..5 {
            let (f, b) = block_averages(&s, 0, j, 2).unwrap();
            assert!((fwd[j] - f).abs() < 1e-15);
            assert!((fwd[(j + 3) % 5] - b).abs() < 1e-15);
        }
    }

    #[test]
    fn window_variance_is_one_over_l() {
        let (l, draws) = (4usize, 100_000u64);
        let mut sum = [0.0f64; 2];
        for seed in 0..draws {
            let s = sample_stationary(1, 16, seed).unwrap();
            let (f, b) = block_averages(&s, 0, 5, l).unwrap();
            sum[0] += f * f;
            sum[1] += b * b;
        }
        // Var(x²) = 2σ⁴ for a centred Gaussian
        let se = (2.0 / (l * l) as f64 / draws as f64).sqrt();
        for s in sum {
            assert!((s / draws as f64 - 0.25).abs() < 4.0 * se);
        }
    }

    #[test]
    fn discrepancies_vanish_at_unit_window() {
        let s = sample_stationary(2, 12, 5).unwrap();
        let w: Vec<f64> = (0..12).map(|j| (j as f64).sin()).collect();
        let f0 = forward_averages(s.row(0), 1);
        let f1 = forward_averages(s.row(1), 1);
        assert_eq!(bg_integrand(s.row(0), &f0, 1, &w), 0.0);
        assert_eq!(crossed_bg_integrand(s.row(0), s.row(1), &f0, &f1, &w), 0.0);
    }

    #[test]
    fn discrepancies_vanish_on_constants() {
        let s = LatticeState::constant(2, 12, 1.5).unwrap();
        let w = vec![1.0; 12];
        for l in 1..=6 {
            let f = forward_averages(s.row(0), l);
            assert!(bg_integrand(s.row(0), &f, l, &w).abs() < 1e-12);
            assert!(crossed_bg_integrand(s.row(0), s.row(1), &f, &f, &w).abs() < 1e-12);
        }
        let zero = LatticeState::zeros(1, 4).unwrap();
        assert_eq!(y_integrand(zero.row(0), &[1.0, 2.0, 3.0, 4.0]), 10.0);
    }
}
