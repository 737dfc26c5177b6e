use std::collections::BTreeMap;

use crate::coefficients::ModelCoefficients;
use crate::error::{Error, Result};
use crate::symbolic::GeneratorParams;

use super::state::LatticeState;

/// One quadratic term `coef · u_{a, j+da} · u_{b, j+db}` of `G_{k,j}`, with
/// `da, db ∈ {0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxTerm {
    pub coef: f64,
    pub a: usize,
    pub da: usize,
    pub b: usize,
    pub db: usize,
}

/// `G_{k,j}` flattened into a list of quadratic terms per component, with
/// like terms merged. Site independent, so compiled once per model.
#[derive(Clone, Debug, PartialEq)]
pub struct CompiledFlux {
    components: usize,
    terms: Vec<Vec<FluxTerm>>,
}

/// `(component, offset)` of one factor of a flux term.
type Factor = (usize, usize);

impl CompiledFlux {
    pub fn new(c: &ModelCoefficients<f64>) -> Self {
        let n = c.components();
        let wrap = |i: isize| i.rem_euclid(n as isize) as usize;
        let mut terms = Vec::with_capacity(n);
        for k in 0..n {
            // keyed by the unordered pair of (component, offset) factors
            let mut acc: BTreeMap<(Factor, Factor), f64> = BTreeMap::new();
            let mut add = |coef: f64, x: (usize, usize), y: (usize, usize)| {
                if coef != 0.0 {
                    let key = if x <= y { (x, y) } else { (y, x) };
                    *acc.entry(key).or_insert(0.0) += coef;
                }
            };
            let ki = k as isize;

            let a3 = c.alpha(k) / 3.0;
            add(a3, (k, 0), (k, 0));
            add(a3, (k, 0), (k, 1));
            add(a3, (k, 1), (k, 1));

            for l in 1..n {
                let kl = wrap(ki + l as isize);
                let b2 = c.beta(k, l) / 2.0;
                add(b2, (k, 0), (kl, 0));
                add(b2, (k, 1), (kl, 1));

                let km = wrap(ki - l as isize);
                add(*c.gamma(k, l), (km, 0), (km, 1));

                for lp in (1..n).filter(|&lp| lp != l) {
                    let lam = *c.lambda_by_offsets(k, l, lp) / 6.0;
                    let kmp = wrap(ki - lp as isize);
                    add(2.0 * lam, (km, 0), (kmp, 0));
                    add(lam, (km, 0), (kmp, 1));
                    add(lam, (km, 1), (kmp, 0));
                    add(2.0 * lam, (km, 1), (kmp, 1));
                }
            }
            terms.push(
                acc.into_iter()
                    .filter(|&(_, coef)| coef != 0.0)
                    .map(|(((a, da), (b, db)), coef)| FluxTerm { coef, a, da, b, db })
                    .collect(),
            );
        }
        Self { components: n, terms }
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn terms(&self, k: usize) -> &[FluxTerm] {
        &self.terms[k]
    }

    /// Writes `G_{k,j}` into `out` (row-major, `K × M`). `shifted` is scratch
    /// space of the same size and receives `u_{k,j+1}`.
    pub fn flux_into(&self, state: &LatticeState, shifted: &mut [f64], out: &mut [f64]) {
        let (kk, m) = (state.components(), state.sites());
        debug_assert_eq!(kk, self.components);
        let u = state.values();
        for k in 0..kk {
            let row = &u[k * m..(k + 1) * m];
            let dst = &mut shifted[k * m..(k + 1) * m];
            dst[..m - 1].copy_from_slice(&row[1..]);
            dst[m - 1] = row[0];
        }
        out.fill(0.0);
        let shifted = &*shifted;
        for k in 0..kk {
            let dst = &mut out[k * m..(k + 1) * m];
            for t in &self.terms[k] {
                let x = if t.da == 0 {
                    &u[t.a * m..(t.a + 1) * m]
                } else {
                    &shifted[t.a * m..(t.a + 1) * m]
                };
                let y = if t.db == 0 {
                    &u[t.b * m..(t.b + 1) * m]
                } else {
                    &shifted[t.b * m..(t.b + 1) * m]
                };
                for ((o, &xv), &yv) in dst.iter_mut().zip(x).zip(y) {
                    *o += t.coef * xv * yv;
                }
            }
        }
    }
}

fn check_lattice(state: &LatticeState, p: &GeneratorParams<f64>) -> Result<()> {
    if state.components() != p.components() || state.sites() != p.sites() {
        return Err(Error::Dimension(format!(
            "state is {}x{}, parameters are {}x{}",
            state.components(),
            state.sites(),
            p.components(),
            p.sites()
        )));
    }
    Ok(())
}

/// `G_{k,j}` at every site, row-major.
pub fn flux_eval(state: &LatticeState, p: &GeneratorParams<f64>) -> Result<Vec<f64>> {
    check_lattice(state, p)?;
    let n = state.values().len();
    let mut shifted = vec![0.0; n];
    let mut out = vec![0.0; n];
    CompiledFlux::new(p.coefficients()).flux_into(state, &mut shifted, &mut out);
    Ok(out)
}

/// `B_{k,j} = G_{k,j} − G_{k,j−1}` at every site, row-major.
pub fn drift_eval(state: &LatticeState, p: &GeneratorParams<f64>) -> Result<Vec<f64>> {
    let g = flux_eval(state, p)?;
    let m = state.sites();
    Ok((0..g.len())
        .map(|i| {
            let (k, j) = (i / m, i % m);
            g[i] - g[k * m + (j + m - 1) % m]
        })
        .collect())
}
