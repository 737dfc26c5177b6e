use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::rational::{format_rational, Rational};

/// Product of variables with positive exponents, sorted by variable index.
/// Variable `(k, j)` has index `k * M + j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn variable(index: u32) -> Self {
        Monomial(vec![(index, 1)])
    }

    /// Builds a monomial from `(variable, exponent)` pairs in any order.
    pub fn from_powers(powers: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut map = BTreeMap::new();
        for (v, e) in powers {
            if e > 0 {
                *map.entry(v).or_insert(0) += e;
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn powers(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, var: u32) -> u32 {
        self.0
            .binary_search_by_key(&var, |&(v, _)| v)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `∂_var` of the monomial as `(exponent, lowered monomial)`.
    pub fn derivative(&self, var: u32) -> Option<(u32, Monomial)> {
        let pos = self.0.binary_search_by_key(&var, |&(v, _)| v).ok()?;
        let e = self.0[pos].1;
        let mut lowered = self.0.clone();
        if e == 1 {
            lowered.remove(pos);
        } else {
            lowered[pos].1 = e - 1;
        }
        Some((e, Monomial(lowered)))
    }
}

/// Polynomial in the lattice variables `u_{k,j}`, `k ∈ ℤ_K`, `j ∈ ℤ_M`, with
/// exact rational coefficients. Zero coefficients are never stored, so
/// structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolynomial {
    components: usize,
    sites: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl LatticePolynomial {
    pub fn zero(components: usize, sites: usize) -> Self {
        assert!(components > 0 && sites > 0, "lattice dimensions must be positive");
        Self {
            components,
            sites,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(components: usize, sites: usize, c: Rational) -> Self {
        let mut p = Self::zero(components, sites);
        p.add_term(Monomial::one(), c);
        p
    }

    /// The variable `u_{k,j}`, both indices periodic.
    pub fn var(components: usize, sites: usize, k: isize, j: isize) -> Self {
        let mut p = Self::zero(components, sites);
        let index = Self::index_of(components, sites, k, j);
        p.add_term(Monomial::variable(index), Rational::one());
        p
    }

    pub fn monomial(components: usize, sites: usize, m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(components, sites);
        p.add_term(m, c);
        p
    }

    pub fn index_of(components: usize, sites: usize, k: isize, j: isize) -> u32 {
        let k = k.rem_euclid(components as isize) as usize;
        let j = j.rem_euclid(sites as isize) as usize;
        (k * sites + j) as u32
    }

    pub fn variable_site(&self, index: u32) -> (usize, usize) {
        let index = index as usize;
        (index / self.sites, index % self.sites)
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn variable_count(&self) -> usize {
        self.components * self.sites
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    fn assert_same_lattice(&self, other: &Self) {
        assert!(
            self.components == other.components && self.sites == other.sites,
            "polynomials live on different lattices"
        );
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.components, self.sites);
        }
        Self {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
            ..*self
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Rational) {
        self.assert_same_lattice(other);
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    /// `∂ / ∂u_{k,j}`.
    pub fn derivative(&self, k: isize, j: isize) -> Self {
        let var = Self::index_of(self.components, self.sites, k, j);
        self.derivative_var(var)
    }

    pub fn derivative_var(&self, var: u32) -> Self {
        let mut out = Self::zero(self.components, self.sites);
        for (m, c) in &self.terms {
            if let Some((e, lowered)) = m.derivative(var) {
                out.add_term(lowered, c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    /// Variables that actually occur.
    pub fn support(&self) -> Vec<u32> {
        let mut vars: Vec<u32> = self
            .terms
            .keys()
            .flat_map(|m| m.powers().iter().map(|&(v, _)| v))
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    pub fn evaluate(&self, values: &[Rational]) -> Rational {
        assert_eq!(values.len(), self.variable_count());
        self.terms
            .iter()
            .map(|(m, c)| {
                m.powers().iter().fold(c.clone(), |acc, &(v, e)| {
                    acc * num_traits::pow(values[v as usize].clone(), e as usize)
                })
            })
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn evaluate_f64(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.variable_count());
        self.terms
            .iter()
            .map(|(m, c)| {
                let coef = num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN);
                m.powers()
                    .iter()
                    .fold(coef, |acc, &(v, e)| acc * values[v as usize].powi(e as i32))
            })
            .sum()
    }
}

impl Add for &LatticePolynomial {
    type Output = LatticePolynomial;
    fn add(self, rhs: Self) -> LatticePolynomial {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub for &LatticePolynomial {
    type Output = LatticePolynomial;
    fn sub(self, rhs: Self) -> LatticePolynomial {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &LatticePolynomial {
    type Output = LatticePolynomial;
    fn neg(self) -> LatticePolynomial {
        self.scale(&-Rational::one())
    }
}

impl Mul for &LatticePolynomial {
    type Output = LatticePolynomial;
    fn mul(self, rhs: Self) -> LatticePolynomial {
        self.assert_same_lattice(rhs);
        let mut out = LatticePolynomial::zero(self.components, self.sites);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

/// One term per line, `c * u[k,j]^e * ...`, in canonical monomial order;
/// the zero polynomial prints as `0`.
impl fmt::Display for LatticePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", format_rational(c))?;
            for &(v, e) in m.powers() {
                let (k, j) = self.variable_site(v);
                write!(f, " * u[{k},{j}]^{e}")?;
            }
        }
        Ok(())
    }
}
