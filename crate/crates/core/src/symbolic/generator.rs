use num_traits::{One, Zero};

use super::params::GeneratorParams;
use super::polynomial::LatticePolynomial;
use super::wick::gaussian_expectation;
use crate::error::Result;
use crate::rational::{ratio, Rational};

/// The flux `G_{k,j}`, so that `B_{k,j} = G_{k,j} − G_{k,j−1}`.
pub fn flux_polynomial(k: usize, j: isize, p: &GeneratorParams<Rational>) -> LatticePolynomial {
    let (kk, m) = (p.components(), p.sites());
    let c = p.coefficients();
    let k = k as isize;
    let u = |comp: isize, site: isize| LatticePolynomial::var(kk, m, comp, site);
    let mut g = LatticePolynomial::zero(kk, m);

    let (a, b) = (u(k, j), u(k, j + 1));
    let w = &(&(&a * &a) + &(&a * &b)) + &(&b * &b);
    g.add_scaled(&w, &(c.alpha(k as usize) / ratio(3, 1)));

    for l in 1..kk as isize {
        let kl = (k + l).rem_euclid(kk as isize) as usize;
        let beta = c.beta(k as usize, l as usize);
        if !beta.is_zero() {
            let bl = &(&u(k, j) * &u(kl as isize, j)) + &(&u(k, j + 1) * &u(kl as isize, j + 1));
            g.add_scaled(&bl, &(beta / ratio(2, 1)));
        }
        let gamma = c.gamma(k as usize, l as usize);
        if !gamma.is_zero() {
            let r = &u(k - l, j) * &u(k - l, j + 1);
            g.add_scaled(&r, gamma);
        }
        for lp in (1..kk as isize).filter(|&lp| lp != l) {
            let lambda = c.lambda_by_offsets(k as usize, l as usize, lp as usize);
            if lambda.is_zero() {
                continue;
            }
            let two = ratio(2, 1);
            let mut pp = (&u(k - l, j) * &u(k - lp, j)).scale(&two);
            pp.add_scaled(&(&u(k - l, j) * &u(k - lp, j + 1)), &Rational::one());
            pp.add_scaled(&(&u(k - l, j + 1) * &u(k - lp, j)), &Rational::one());
            pp.add_scaled(&(&u(k - l, j + 1) * &u(k - lp, j + 1)), &two);
            g.add_scaled(&pp, &(lambda / ratio(6, 1)));
        }
    }
    g
}

/// The drift `B_{k,j} = G_{k,j} − G_{k,j−1}`.
pub fn drift_polynomial(k: usize, j: usize, p: &GeneratorParams<Rational>) -> LatticePolynomial {
    let j = j as isize;
    &flux_polynomial(k, j, p) - &flux_polynomial(k, j - 1, p)
}

/// The generator with all drift polynomials precomputed.
#[derive(Clone, Debug)]
pub struct Generator {
    params: GeneratorParams<Rational>,
    drifts: Vec<LatticePolynomial>,
}

impl Generator {
    pub fn new(params: &GeneratorParams<Rational>) -> Self {
        let drifts = (0..params.components())
            .flat_map(|k| (0..params.sites()).map(move |j| (k, j)))
            .map(|(k, j)| drift_polynomial(k, j, params))
            .collect();
        Self {
            params: params.clone(),
            drifts,
        }
    }

    pub fn params(&self) -> &GeneratorParams<Rational> {
        &self.params
    }

    pub fn drift(&self, k: usize, j: usize) -> &LatticePolynomial {
        &self.drifts[k * self.params.sites() + j]
    }

    fn check_lattice(&self, f: &LatticePolynomial) {
        assert!(
            f.components() == self.params.components() && f.sites() == self.params.sites(),
            "polynomial lattice does not match generator lattice"
        );
    }

    /// `S f`, the part of the generator that is symmetric in `L²(μ)`:
    /// `Σ ½ (∂_{k,j+1} − ∂_{k,j})² f − ½ (u_{k,j+1} − u_{k,j})(∂_{k,j+1} − ∂_{k,j}) f`.
    pub fn apply_symmetric(&self, f: &LatticePolynomial) -> LatticePolynomial {
        self.check_lattice(f);
        let (kk, m) = (f.components(), f.sites());
        let half = ratio(1, 2);
        let mut out = LatticePolynomial::zero(kk, m);
        for k in 0..kk as isize {
            for j in 0..m as isize {
                let grad = &f.derivative(k, j + 1) - &f.derivative(k, j);
                if grad.is_zero() {
                    continue;
                }
                let second = &grad.derivative(k, j + 1) - &grad.derivative(k, j);
                out.add_scaled(&second, &half);
                let slope = &LatticePolynomial::var(kk, m, k, j + 1) - &LatticePolynomial::var(kk, m, k, j);
                out.add_scaled(&(&slope * &grad), &-half.clone());
            }
        }
        out
    }

    /// `Σ B_{k,j} ∂_{k,j} f`, the drift part without the `ε` factor.
    pub fn apply_drift(&self, f: &LatticePolynomial) -> LatticePolynomial {
        self.check_lattice(f);
        let (kk, m) = (f.components(), f.sites());
        let mut out = LatticePolynomial::zero(kk, m);
        for var in f.support() {
            let (k, j) = f.variable_site(var);
            let d = f.derivative_var(var);
            out.add_scaled(&(self.drift(k, j) * &d), &Rational::one());
        }
        out
    }

    /// `L f = S f + ε Σ B_{k,j} ∂_{k,j} f`.
    pub fn apply(&self, f: &LatticePolynomial) -> LatticePolynomial {
        let mut out = self.apply_symmetric(f);
        out.add_scaled(&self.apply_drift(f), self.params.epsilon());
        out
    }

    /// `L* f = S f − ε Σ B_{k,j} ∂_{k,j} f`.
    pub fn apply_adjoint(&self, f: &LatticePolynomial) -> LatticePolynomial {
        let mut out = self.apply_symmetric(f);
        out.add_scaled(&self.apply_drift(f), &-self.params.epsilon().clone());
        out
    }

    pub fn divergence_identity(&self) -> LatticePolynomial {
        let (kk, m) = (self.params.components(), self.params.sites());
        let mut out = LatticePolynomial::zero(kk, m);
        for k in 0..kk {
            for j in 0..m {
                let b = self.drift(k, j);
                let u = LatticePolynomial::var(kk, m, k as isize, j as isize);
                out.add_scaled(&(&u * b), &Rational::one());
                out.add_scaled(&b.derivative(k as isize, j as isize), &-Rational::one());
            }
        }
        out
    }

    pub fn stationarity_residual(&self, f: &LatticePolynomial) -> Result<Rational> {
        gaussian_expectation(&self.apply(f))
    }
}

/// `Σ_{k,j} (u_{k,j} B_{k,j} − ∂_{k,j} B_{k,j})`, the zero polynomial exactly
/// when the coefficient constraints hold.
pub fn divergence_identity(p: &GeneratorParams<Rational>) -> LatticePolynomial {
    Generator::new(p).divergence_identity()
}

pub fn apply_generator(f: &LatticePolynomial, p: &GeneratorParams<Rational>) -> LatticePolynomial {
    Generator::new(p).apply(f)
}

pub fn apply_adjoint(f: &LatticePolynomial, p: &GeneratorParams<Rational>) -> LatticePolynomial {
    Generator::new(p).apply_adjoint(f)
}

/// `E_μ[L f]`; zero for every polynomial `f` iff `μ` is invariant.
pub fn stationarity_residual(f: &LatticePolynomial, p: &GeneratorParams<Rational>) -> Result<Rational> {
    Generator::new(p).stationarity_residual(f)
}
