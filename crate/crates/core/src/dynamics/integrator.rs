use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::seeding::stream_rng;
use crate::symbolic::GeneratorParams;

use super::drift::CompiledFlux;
use super::state::LatticeState;

/// Largest accepted time step. The spectral radius of `½Δ` on `ℤ_M` is at
/// most 2, so explicit Euler is stable far below this.
pub const STABILITY_BOUND: f64 = 0.25;
pub const DEFAULT_DT: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    EulerMaruyama,
}

impl Scheme {
    pub fn tag(self) -> &'static str {
        match self {
            Scheme::EulerMaruyama => "euler-maruyama",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "euler-maruyama" => Ok(Scheme::EulerMaruyama),
            other => Err(Error::Format(format!("unknown scheme tag {other:?}"))),
        }
    }
}

pub fn check_dt(dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time step must be positive and finite, got {dt}"
        )));
    }
    if dt > STABILITY_BOUND {
        return Err(Error::UnstableTimeStep {
            dt,
            bound: STABILITY_BOUND,
        });
    }
    Ok(())
}

/// Fills `out` with the standard normals `η` used at step `step`. Each step
/// draws from its own ChaCha stream, so any step can be regenerated alone.
pub fn step_noise(seed: u64, step: u64, out: &mut [f64]) {
    let mut rng = stream_rng(seed, step);
    for v in out.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
}

/// Euler-Maruyama in flux form: `u'_{k,j} = u_{k,j} + F_{k,j} − F_{k,j−1}`
/// with `F_{k,j} = dt(½(u_{k,j+1} − u_{k,j}) + ε G_{k,j}) + √dt η_{k,j}`.
/// Every increment is a discrete gradient, so `Σ_j u_{k,j}` is conserved up
/// to rounding.
#[derive(Clone, Debug)]
pub struct Integrator {
    params: GeneratorParams<f64>,
    flux: CompiledFlux,
    dt: f64,
    sqrt_dt: f64,
    g: Vec<f64>,
    shifted: Vec<f64>,
    noise: Vec<f64>,
}

impl Integrator {
    pub fn new(params: &GeneratorParams<f64>, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        let n = params.components() * params.sites();
        Ok(Self {
            flux: CompiledFlux::new(params.coefficients()),
            params: params.clone(),
            dt,
            sqrt_dt: dt.sqrt(),
            g: vec![0.0; n],
            shifted: vec![0.0; n],
            noise: vec![0.0; n],
        })
    }

    pub fn params(&self) -> &GeneratorParams<f64> {
        &self.params
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn check_state(&self, state: &LatticeState) -> Result<()> {
        if state.components() != self.params.components() || state.sites() != self.params.sites() {
            return Err(Error::Dimension(format!(
                "state is {}x{}, integrator expects {}x{}",
                state.components(),
                state.sites(),
                self.params.components(),
                self.params.sites()
            )));
        }
        Ok(())
    }

    /// One step with caller-supplied noise. Returns `false` if the new state
    /// has a non-finite entry (the state is then left as computed).
    pub fn step_with_noise(&mut self, state: &mut LatticeState, noise: &[f64]) -> Result<bool> {
        self.check_state(state)?;
        if noise.len() != self.g.len() {
            return Err(Error::Dimension(format!(
                "noise has {} entries, expected {}",
                noise.len(),
                self.g.len()
            )));
        }
        Ok(self.advance(state, noise))
    }

    /// One step with the counter-based noise of `(seed, step)`.
    pub fn step_seeded(&mut self, state: &mut LatticeState, seed: u64, step: u64) -> Result<bool> {
        self.check_state(state)?;
        let mut noise = std::mem::take(&mut self.noise);
        step_noise(seed, step, &mut noise);
        let ok = self.advance(state, &noise);
        self.noise = noise;
        Ok(ok)
    }

    fn advance(&mut self, state: &mut LatticeState, noise: &[f64]) -> bool {
        let (kk, m) = (state.components(), state.sites());
        let eps = *self.params.epsilon();
        let (dt, sdt) = (self.dt, self.sqrt_dt);
        self.flux.flux_into(state, &mut self.shifted, &mut self.g);

        // turn G into the full bond flux F in place
        let u = state.values();
        for i in 0..kk * m {
            self.g[i] = dt * (0.5 * (self.shifted[i] - u[i]) + eps * self.g[i]) + sdt * noise[i];
        }
        let mut finite = true;
        let u = state.values_mut();
        for k in 0..kk {
            let f = &self.g[k * m..(k + 1) * m];
            let row = &mut u[k * m..(k + 1) * m];
            let mut prev = f[m - 1];
            for (x, &fj) in row.iter_mut().zip(f) {
                *x += fj - prev;
                prev = fj;
                finite &= x.is_finite();
            }
        }
        finite
    }

    /// Runs `n_steps` steps from `state` in place, calling `observe(step,
    /// state)` at step 0, every `stride` steps, and at the final step.
    pub fn run(
        &mut self,
        state: &mut LatticeState,
        n_steps: u64,
        stride: u64,
        seed: u64,
        mut observe: impl FnMut(u64, &LatticeState),
    ) -> Result<()> {
        self.check_state(state)?;
        if stride == 0 {
            return Err(Error::InvalidParameter("snapshot stride must be >= 1".into()));
        }
        observe(0, state);
        for step in 1..=n_steps {
            if !self.step_seeded(state, seed, step)? {
                return Err(Error::NonFinite { step });
            }
            if step % stride == 0 || step == n_steps {
                observe(step, state);
            }
        }
        Ok(())
    }
}

/// A single explicit step; see [`Integrator`].
pub fn em_step(state: &LatticeState, p: &GeneratorParams<f64>, dt: f64, noise: &[f64]) -> Result<LatticeState> {
    let mut next = state.clone();
    let mut integrator = Integrator::new(p, dt)?;
    if !integrator.step_with_noise(&mut next, noise)? {
        return Err(Error::NonFinite { step: 1 });
    }
    Ok(next)
}

/// Number of microscopic steps covering macroscopic time `t` on a lattice of
/// size `n`, i.e. `round(t n² / dt)`.
pub fn steps_for_macroscopic_time(t: f64, n: usize, dt: f64) -> u64 {
    (t * (n * n) as f64 / dt).round() as u64
}
