use serde::{Deserialize, Serialize};

use crate::dynamics::{CompiledFlux, LatticeState};
use crate::error::{Error, Result};
use crate::symbolic::GeneratorParams;

use super::calculus::TestFunction;
use super::observables::{
    bg_integrand, check_grid, check_window, crossed_bg_integrand, forward_averages, pair, y_integrand,
};

/// Spatial weight in the discrepancy integrands.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weight {
    /// `∇^n φ_j`
    #[default]
    Gradient,
    /// `φ_j`
    Plain,
}

/// Pair of window means in the diagonal quadratic field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadraticKernel {
    /// `←u^l_{i,j} →u^l_{i,j}`
    #[default]
    BackwardForward,
    /// `(→u^l_{i,j})²`
    ForwardForward,
}

/// A scalar functional of one trajectory on `[0, t]`, macroscopic time.
#[derive(Clone, Debug, PartialEq)]
pub enum Functional {
    /// `𝒳^n_{k,t}(φ)`
    Field { phi: TestFunction, k: usize },
    /// `𝒮^n_{k,t}(φ) = ∫ (1/(2√n)) Σ u_{k,j} Δ^n φ_j ds`
    Symmetric { phi: TestFunction, k: usize },
    /// `𝒜^n_{k,t}(φ) = −ε√n ∫ Σ G_{k,j} ∇^n φ_j ds`
    Antisymmetric { phi: TestFunction, k: usize },
    /// `ℳ^n_{k,t}(φ) = 𝒳_t − 𝒳_0 − 𝒮_t − 𝒜_t`
    Martingale { phi: TestFunction, k: usize },
    BoltzmannGibbs {
        phi: TestFunction,
        k: usize,
        l: usize,
        weight: Weight,
    },
    CrossedBoltzmannGibbs {
        phi: TestFunction,
        k: usize,
        k_bar: usize,
        l: usize,
        weight: Weight,
    },
    YRemainder {
        phi: TestFunction,
        k: usize,
        weight: Weight,
    },
    /// Discrete quadratic field with `ε_reg = l/n`, weight `∇^n φ`.
    Quadratic {
        phi: TestFunction,
        i: usize,
        j: usize,
        l: usize,
        kernel: QuadraticKernel,
    },
    /// Mean of `u_{k,j}^power` over all sites and snapshots.
    SiteMoment { power: u32 },
}

impl Functional {
    pub fn label(&self) -> String {
        match self {
            Functional::Field { phi, k } => format!("field[{},k={k}]", phi.id()),
            Functional::Symmetric { phi, k } => format!("symmetric[{},k={k}]", phi.id()),
            Functional::Antisymmetric { phi, k } => format!("antisymmetric[{},k={k}]", phi.id()),
            Functional::Martingale { phi, k } => format!("martingale[{},k={k}]", phi.id()),
            Functional::BoltzmannGibbs { phi, k, l, weight } => {
                format!("bg[{},k={k},l={l},{}]", phi.id(), weight_tag(*weight))
            }
            Functional::CrossedBoltzmannGibbs {
                phi,
                k,
                k_bar,
                l,
                weight,
            } => format!(
                "crossed-bg[{},k={k},kbar={k_bar},l={l},{}]",
                phi.id(),
                weight_tag(*weight)
            ),
            Functional::YRemainder { phi, k, weight } => format!("y[{},k={k},{}]", phi.id(), weight_tag(*weight)),
            Functional::Quadratic { phi, i, j, l, kernel } => {
                let tag = match kernel {
                    QuadraticKernel::BackwardForward => "bf",
                    QuadraticKernel::ForwardForward => "ff",
                };
                format!("quadratic[{},i={i},j={j},l={l},{tag}]", phi.id())
            }
            Functional::SiteMoment { power } => format!("site-moment[{power}]"),
        }
    }

    fn phi(&self) -> Option<&TestFunction> {
        match self {
            Functional::Field { phi, .. }
            | Functional::Symmetric { phi, .. }
            | Functional::Antisymmetric { phi, .. }
            | Functional::Martingale { phi, .. }
            | Functional::BoltzmannGibbs { phi, .. }
            | Functional::CrossedBoltzmannGibbs { phi, .. }
            | Functional::YRemainder { phi, .. }
            | Functional::Quadratic { phi, .. } => Some(phi),
            Functional::SiteMoment { .. } => None,
        }
    }

    fn needs_flux(&self) -> bool {
        matches!(self, Functional::Antisymmetric { .. } | Functional::Martingale { .. })
    }

    /// Block lengths needed per component.
    fn windows(&self) -> Vec<(usize, usize)> {
        match *self {
            Functional::BoltzmannGibbs { k, l, .. } => vec![(k, l)],
            Functional::CrossedBoltzmannGibbs { k, k_bar, l, .. } => vec![(k, l), (k_bar, l)],
            Functional::Quadratic { i, j, l, .. } => vec![(i, l), (j, l)],
            _ => Vec::new(),
        }
    }

    fn validate(&self, components: usize, n: usize) -> Result<()> {
        let comp = |k: usize| {
            if k < components {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "component {k} out of range for K = {components}"
                )))
            }
        };
        match *self {
            Functional::Field { k, .. }
            | Functional::Symmetric { k, .. }
            | Functional::Antisymmetric { k, .. }
            | Functional::Martingale { k, .. }
            | Functional::YRemainder { k, .. } => comp(k),
            Functional::BoltzmannGibbs { k, l, .. } => {
                comp(k)?;
                check_window(l, n, n / 2)
            }
            Functional::CrossedBoltzmannGibbs { k, k_bar, l, .. } => {
                comp(k)?;
                comp(k_bar)?;
                if k == k_bar {
                    return Err(Error::InvalidParameter("crossed discrepancy needs k != k_bar".into()));
                }
                check_window(l, n, n / 2)
            }
            Functional::Quadratic { i, j, l, .. } => {
                comp(i)?;
                comp(j)?;
                check_window(l, n, n)
            }
            Functional::SiteMoment { power } => {
                if power == 0 {
                    Err(Error::InvalidParameter("site moment power must be >= 1".into()))
                } else {
                    Ok(())
                }
            }
        }
    }
}

fn weight_tag(w: Weight) -> &'static str {
    match w {
        Weight::Gradient => "grad",
        Weight::Plain => "plain",
    }
}

/// Converts a regularization `ε_reg` into the window length `l = ε_reg · n`,
/// rejecting values off the grid.
pub fn window_for_epsilon(eps_reg: f64, n: usize) -> Result<usize> {
    let l = eps_reg * n as f64;
    let rounded = l.round();
    if eps_reg.is_nan() || eps_reg <= 0.0 || (l - rounded).abs() > 1e-9 * l.max(1.0) || rounded < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon {eps_reg} is not a positive multiple of 1/n for n = {n}"
        )));
    }
    Ok(rounded as usize)
}

/// Trapezoidal rule over irregular sample times.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TimeIntegral {
    last: Option<(f64, f64)>,
    total: f64,
}

impl TimeIntegral {
    pub fn push(&mut self, t: f64, v: f64) {
        if let Some((t0, v0)) = self.last {
            self.total += 0.5 * (t - t0) * (v + v0);
        }
        self.last = Some((t, v));
    }

    pub fn value(&self) -> f64 {
        self.total
    }
}

#[derive(Clone, Debug)]
struct Slot {
    functional: Functional,
    grid: Vec<f64>,
    weight: Vec<f64>,
    lap: Vec<f64>,
    integral: TimeIntegral,
    first: Option<f64>,
    last: f64,
    moment_sum: f64,
    moment_count: f64,
}

/// Evaluates a set of functionals on one trajectory as its snapshots stream
/// by, sharing the flux and window computations between them.
#[derive(Clone, Debug)]
pub struct Probe {
    n: usize,
    components: usize,
    dt: f64,
    epsilon: f64,
    flux: Option<CompiledFlux>,
    flux_buf: Vec<f64>,
    shifted: Vec<f64>,
    windows: Vec<(usize, usize)>,
    window_buf: Vec<Vec<f64>>,
    slots: Vec<Slot>,
}

impl Probe {
    pub fn new(functionals: &[Functional], params: &GeneratorParams<f64>, dt: f64) -> Result<Self> {
        let (kk, n) = (params.components(), params.sites());
        let mut slots = Vec::with_capacity(functionals.len());
        let mut windows: Vec<(usize, usize)> = Vec::new();
        for f in functionals {
            f.validate(kk, n)?;
            for w in f.windows() {
                if !windows.contains(&w) {
                    windows.push(w);
                }
            }
            let (grid, weight, lap) = match f.phi() {
                Some(phi) => {
                    let g = phi.on_grid(n)?;
                    let weight = match f {
                        Functional::BoltzmannGibbs { weight, .. }
                        | Functional::CrossedBoltzmannGibbs { weight, .. }
                        | Functional::YRemainder { weight, .. } => match weight {
                            Weight::Gradient => g.gradient(),
                            Weight::Plain => g.values.clone(),
                        },
                        _ => g.gradient(),
                    };
                    let lap = g.laplacian();
                    (g.values, weight, lap)
                }
                None => (Vec::new(), Vec::new(), Vec::new()),
            };
            slots.push(Slot {
                functional: f.clone(),
                grid,
                weight,
                lap,
                integral: TimeIntegral::default(),
                first: None,
                last: 0.0,
                moment_sum: 0.0,
                moment_count: 0.0,
            });
        }
        let needs_flux = functionals.iter().any(Functional::needs_flux);
        Ok(Self {
            n,
            components: kk,
            dt,
            epsilon: *params.epsilon(),
            flux: needs_flux.then(|| CompiledFlux::new(params.coefficients())),
            flux_buf: vec![0.0; kk * n],
            shifted: vec![0.0; kk * n],
            window_buf: vec![Vec::new(); windows.len()],
            windows,
            slots,
        })
    }

    fn window(&self, k: usize, l: usize) -> &[f64] {
        let idx = self
            .windows
            .iter()
            .position(|&w| w == (k, l))
            .expect("window registered");
        &self.window_buf[idx]
    }

    /// Feeds the state after microscopic step `step`.
    pub fn observe(&mut self, step: u64, state: &LatticeState) {
        debug_assert!(check_grid(state, self.n).is_ok() && state.components() == self.components);
        let n = self.n;
        let t = step as f64 * self.dt / (n * n) as f64;
        if let Some(flux) = &self.flux {
            flux.flux_into(state, &mut self.shifted, &mut self.flux_buf);
        }
        for (idx, &(k, l)) in self.windows.iter().enumerate() {
            self.window_buf[idx] = forward_averages(state.row(k), l);
        }
        let sqrt_n = (n as f64).sqrt();
        let mut slots = std::mem::take(&mut self.slots);
        for slot in &mut slots {
            match slot.functional {
                Functional::Field { k, .. } => {
                    let x = pair(state.row(k), &slot.grid) / sqrt_n;
                    slot.first.get_or_insert(x);
                    slot.last = x;
                }
                Functional::Symmetric { k, .. } => {
                    slot.integral.push(t, pair(state.row(k), &slot.lap) / (2.0 * sqrt_n));
                }
                Functional::Antisymmetric { k, .. } => {
                    let g = &self.flux_buf[k * n..(k + 1) * n];
                    slot.integral.push(t, -self.epsilon * sqrt_n * pair(g, &slot.weight));
                }
                Functional::Martingale { k, .. } => {
                    let x = pair(state.row(k), &slot.grid) / sqrt_n;
                    slot.first.get_or_insert(x);
                    slot.last = x;
                    let g = &self.flux_buf[k * n..(k + 1) * n];
                    let drift =
                        pair(state.row(k), &slot.lap) / (2.0 * sqrt_n) - self.epsilon * sqrt_n * pair(g, &slot.weight);
                    slot.integral.push(t, drift);
                }
                Functional::BoltzmannGibbs { k, l, .. } => {
                    let v = bg_integrand(state.row(k), self.window(k, l), l, &slot.weight);
                    slot.integral.push(t, v);
                }
                Functional::CrossedBoltzmannGibbs { k, k_bar, l, .. } => {
                    let v = crossed_bg_integrand(
                        state.row(k),
                        state.row(k_bar),
                        self.window(k, l),
                        self.window(k_bar, l),
                        &slot.weight,
                    );
                    slot.integral.push(t, v);
                }
                Functional::YRemainder { k, .. } => {
                    slot.integral.push(t, y_integrand(state.row(k), &slot.weight));
                }
                Functional::Quadratic { i, j, l, kernel, .. } => {
                    let v = if i == j {
                        let fwd = self.window(i, l);
                        match kernel {
                            QuadraticKernel::BackwardForward => {
                                (0..n).map(|x| fwd[(x + n - l % n) % n] * fwd[x] * slot.weight[x]).sum()
                            }
                            QuadraticKernel::ForwardForward => (0..n).map(|x| fwd[x] * fwd[x] * slot.weight[x]).sum(),
                        }
                    } else {
                        let (a, b) = (self.window(i, l), self.window(j, l));
                        (0..n)
                            .map(|x| {
                                let p = (x + n - 1) % n;
                                a[p] * b[p] * slot.weight[x]
                            })
                            .sum()
                    };
                    slot.integral.push(t, v);
                }
                Functional::SiteMoment { power } => {
                    slot.moment_sum += state.values().iter().map(|v| v.powi(power as i32)).sum::<f64>();
                    slot.moment_count += state.values().len() as f64;
                }
            }
        }
        self.slots = slots;
    }

    /// Current value of every functional, in construction order.
    pub fn values(&self) -> Vec<f64> {
        self.slots
            .iter()
            .map(|s| match s.functional {
                Functional::Field { .. } => s.last,
                Functional::Martingale { .. } => s.last - s.first.unwrap_or(0.0) - s.integral.value(),
                Functional::SiteMoment { .. } => s.moment_sum / s.moment_count.max(1.0),
                _ => s.integral.value(),
            })
            .collect()
    }
}
