use std::io::Write;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

use super::calculus::TestFunction;
use super::functional::{window_for_epsilon, Functional, Probe, QuadraticKernel, Weight};

pub const FIELDS_CSV_VERSION: u32 = 1;

/// Values of one functional at the snapshot times of a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSeries {
    pub label: String,
    pub phi_id: String,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    /// Macroscopic times.
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl FieldSeries {
    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("series is never empty")
    }

    pub fn records(&self, components: usize, l_or_eps: f64) -> Vec<FieldRecord> {
        self.times
            .iter()
            .zip(&self.values)
            .map(|(&t, &value)| FieldRecord {
                seed: self.seed,
                n: self.n,
                components,
                k: self.k,
                phi_id: self.phi_id.clone(),
                l_or_eps,
                t,
                value,
            })
            .collect()
    }
}

/// One row of the fields CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldRecord {
    pub seed: u64,
    pub n: usize,
    pub components: usize,
    pub k: usize,
    pub phi_id: String,
    pub l_or_eps: f64,
    pub t: f64,
    pub value: f64,
}

pub fn write_csv(records: &[FieldRecord], w: &mut impl Write) -> Result<()> {
    writeln!(w, "# ssburgers fields v{FIELDS_CSV_VERSION}")?;
    writeln!(w, "seed,n,K,k,phi_id,l_or_eps,t,value")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{:e}",
            r.seed, r.n, r.components, r.k, r.phi_id, r.l_or_eps, r.t, r.value
        )?;
    }
    Ok(())
}

fn check_trajectory(traj: &Trajectory) -> Result<usize> {
    if traj.snapshots.is_empty() {
        return Err(Error::InvalidParameter("trajectory has no snapshots".into()));
    }
    Ok(traj.params.sites())
}

/// Runs `functionals` through the snapshots and records their values at every
/// snapshot time up to `t_max`.
fn run_series(traj: &Trajectory, functionals: &[Functional], t_max: Option<f64>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = check_trajectory(traj)?;
    let mut probe = Probe::new(functionals, &traj.params, traj.dt)?;
    let times = traj.macroscopic_times(n);
    let mut out_t = Vec::new();
    let mut out_v = vec![Vec::new(); functionals.len()];
    for (snap, &t) in traj.snapshots.iter().zip(&times) {
        if let Some(limit) = t_max {
            if t > limit * (1.0 + 1e-12) + 1e-15 {
                break;
            }
        }
        probe.observe(snap.step, &snap.state);
        out_t.push(t);
        for (dst, v) in out_v.iter_mut().zip(probe.values()) {
            dst.push(v);
        }
    }
    if let Some(limit) = t_max {
        let last = *out_t.last().unwrap();
        if (last - limit).abs() > 1e-9 * limit.max(1e-12) {
            return Err(Error::InvalidParameter(format!(
                "no snapshot at macroscopic time {limit}; nearest earlier is {last}"
            )));
        }
    }
    Ok((out_t, out_v))
}

fn single(traj: &Trajectory, f: Functional, t: f64) -> Result<f64> {
    let (_, values) = run_series(traj, &[f], Some(t))?;
    Ok(*values[0].last().unwrap())
}

fn series(
    traj: &Trajectory,
    f: &Functional,
    phi: &TestFunction,
    k: usize,
    times: &[f64],
    values: Vec<f64>,
) -> FieldSeries {
    FieldSeries {
        label: f.label(),
        phi_id: phi.id(),
        n: traj.params.sites(),
        k,
        seed: traj.seed,
        times: times.to_vec(),
        values,
    }
}

/// `𝒳^n_{k,t}(φ)` along the trajectory.
pub fn field_series(traj: &Trajectory, phi: &TestFunction, k: usize) -> Result<FieldSeries> {
    let f = Functional::Field { phi: phi.clone(), k };
    let (times, mut v) = run_series(traj, std::slice::from_ref(&f), None)?;
    Ok(series(traj, &f, phi, k, &times, v.remove(0)))
}

/// `(𝒮, 𝒜, ℳ)` along the trajectory, with `ℳ` defined by subtraction so that
/// `𝒳_t − 𝒳_0 = 𝒮_t + 𝒜_t + ℳ_t` at every snapshot.
pub fn martingale_decomposition(
    traj: &Trajectory,
    phi: &TestFunction,
    k: usize,
) -> Result<(FieldSeries, FieldSeries, FieldSeries)> {
    let fs = [
        Functional::Symmetric { phi: phi.clone(), k },
        Functional::Antisymmetric { phi: phi.clone(), k },
        Functional::Field { phi: phi.clone(), k },
    ];
    let (times, mut v) = run_series(traj, &fs, None)?;
    let x = v.pop().unwrap();
    let a = v.pop().unwrap();
    let s = v.pop().unwrap();
    let m: Vec<f64> = (0..times.len()).map(|i| x[i] - x[0] - s[i] - a[i]).collect();
    let mart = Functional::Martingale { phi: phi.clone(), k };
    Ok((
        series(traj, &fs[0], phi, k, &times, s),
        series(traj, &fs[1], phi, k, &times, a),
        series(traj, &mart, phi, k, &times, m),
    ))
}

/// `∫_0^t Σ_j [u_{k,j} u_{k,j+1} − ←u^l_{k,j} →u^l_{k,j}] ∇^n φ_j ds`.
pub fn bg_discrepancy(traj: &Trajectory, phi: &TestFunction, k: usize, l: usize, t: f64) -> Result<f64> {
    single(
        traj,
        Functional::BoltzmannGibbs {
            phi: phi.clone(),
            k,
            l,
            weight: Weight::Gradient,
        },
        t,
    )
}

/// `∫_0^t Σ_j [u_{k,j} u_{k̄,j} − →u^l_{k,j−1} →u^l_{k̄,j−1}] ∇^n φ_j ds`.
pub fn crossed_bg_discrepancy(
    traj: &Trajectory,
    phi: &TestFunction,
    k: usize,
    k_bar: usize,
    l: usize,
    t: f64,
) -> Result<f64> {
    single(
        traj,
        Functional::CrossedBoltzmannGibbs {
            phi: phi.clone(),
            k,
            k_bar,
            l,
            weight: Weight::Gradient,
        },
        t,
    )
}

#[allow(clippy::too_many_arguments)]
/// `∫_s^t` of the discrete quadratic field with window `l = ε_reg n`.
pub fn quadratic_field(
    traj: &Trajectory,
    phi: &TestFunction,
    i: usize,
    j: usize,
    eps_reg: f64,
    s: f64,
    t: f64,
    kernel: QuadraticKernel,
) -> Result<f64> {
    let n = check_trajectory(traj)?;
    let l = window_for_epsilon(eps_reg, n)?;
    if !(0.0 <= s && s <= t) {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= s <= t, got s = {s}, t = {t}"
        )));
    }
    let f = Functional::Quadratic {
        phi: phi.clone(),
        i,
        j,
        l,
        kernel,
    };
    let upper = single(traj, f.clone(), t)?;
    let lower = if s > 0.0 { single(traj, f, s)? } else { 0.0 };
    Ok(upper - lower)
}

/// `Y^n_{k,t}(φ) = ∫_0^t Σ_j φ_j (u_{k,j} u_{k,j+1} − u_{k,j}² + 1) ds` with
/// the given weight in place of `φ_j`.
pub fn y_remainder(traj: &Trajectory, phi: &TestFunction, k: usize, t: f64, weight: Weight) -> Result<f64> {
    single(
        traj,
        Functional::YRemainder {
            phi: phi.clone(),
            k,
            weight,
        },
        t,
    )
}
