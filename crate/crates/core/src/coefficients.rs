//! Coupling coefficients of the coupled Burgers system.
//!
//! Two equivalent parametrizations live here: the coupling tensor
//! `Γ^k_{i,j}` of the continuum equations and the `(α, β, γ, λ)` family that
//! drives the discrete drift. All component indices are taken modulo `K`
//! and are zero-based.
//!
//! The identification between the two is
//!
//! ```text
//! α_k = Γ^k_{k,k}      β_k^l / 2 = Γ^k_{k,k+l}
//! γ_k^l = Γ^k_{k-l,k-l}   λ_k^{k-l,k-l'} = Γ^k_{k-l,k-l'}
//! ```
//!
//! and the trilinear condition on `Γ` holds exactly when `β_k^a = 2 γ_{k+a}^a`
//! and `λ_k^{k-a,k-a'} = λ_k^{k-a',k-a} = λ_{k-a}^{k,k-a'}`.

use std::fmt;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::rational::{Rational, Scalar};

/// Default tolerance for the floating-point validity checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[inline]
fn wrap(i: isize, k: usize) -> usize {
    i.rem_euclid(k as isize) as usize
}

/// Outcome of a validity check: valid iff no violations were recorded.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidityReport<V> {
    pub violations: Vec<V>,
}

impl<V> ValidityReport<V> {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Which of the two trilinear relations failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrilinearRelation {
    /// `Γ^k_{i,j} = Γ^k_{j,i}`
    LowerSwap,
    /// `Γ^k_{i,j} = Γ^i_{k,j}`
    UpperExchange,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrilinearViolation<T> {
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub relation: TrilinearRelation,
    pub residual: T,
}

/// The `K × K × K` coupling array `Γ^k_{i,j}`.
///
/// Trilinear validity is not enforced at construction; see [`check_trilinear`].
#[derive(Clone, Debug, PartialEq)]
pub struct GammaTensor<T> {
    components: usize,
    entries: Vec<T>,
}

impl<T: Scalar> GammaTensor<T> {
    pub fn zeros(components: usize) -> Result<Self> {
        Self::from_fn(components, |_, _, _| T::zero())
    }

    pub fn from_fn(components: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Result<Self> {
        if components == 0 {
            return Err(Error::Dimension("a gamma tensor needs K >= 1".into()));
        }
        let mut entries = Vec::with_capacity(components.pow(3));
        for k in 0..components {
            for i in 0..components {
                for j in 0..components {
                    let v = f(k, i, j);
                    if !v.is_finite_value() {
                        return Err(Error::InvalidParameter(format!(
                            "non-finite gamma entry at ({k},{i},{j})"
                        )));
                    }
                    entries.push(v);
                }
            }
        }
        Ok(Self { components, entries })
    }

    /// Builds a tensor from `nested[k][i][j]`.
    pub fn from_nested(nested: Vec<Vec<Vec<T>>>) -> Result<Self> {
        let components = nested.len();
        for (k, plane) in nested.iter().enumerate() {
            if plane.len() != components || plane.iter().any(|row| row.len() != components) {
                return Err(Error::Dimension(format!(
                    "gamma_tensor[{k}] is not {components}x{components}"
                )));
            }
        }
        Self::from_fn(components, |k, i, j| nested[k][i][j].clone())
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<T>>> {
        let n = self.components;
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| (0..n).map(|j| self.get(k, i, j).clone()).collect())
                    .collect()
            })
            .collect()
    }

    pub fn components(&self) -> usize {
        self.components
    }

    #[inline]
    fn offset(&self, k: usize, i: usize, j: usize) -> usize {
        let n = self.components;
        ((k % n) * n + i % n) * n + j % n
    }

    /// `Γ^k_{i,j}`, indices modulo `K`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> &T {
        &self.entries[self.offset(k, i, j)]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, value: T) {
        let at = self.offset(k, i, j);
        self.entries[at] = value;
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> GammaTensor<U> {
        GammaTensor {
            components: self.components,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// Average over the six index permutations generated by the trilinear
    /// relations. The result always passes [`check_trilinear`] exactly.
    pub fn symmetrized(&self) -> Self {
        let six = T::from_i64(6);
        let mut out = self.clone();
        let n = self.components;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let sum = self.get(k, i, j).clone()
                        + self.get(k, j, i).clone()
                        + self.get(i, k, j).clone()
                        + self.get(i, j, k).clone()
                        + self.get(j, k, i).clone()
                        + self.get(j, i, k).clone();
                    out.set(k, i, j, sum / six.clone());
                }
            }
        }
        out
    }
}

/// Checks `Γ^k_{i,j} = Γ^k_{j,i} = Γ^i_{k,j}` entrywise within `tol`.
pub fn check_trilinear<T: Scalar>(g: &GammaTensor<T>, tol: &T) -> ValidityReport<TrilinearViolation<T>> {
    let n = g.components();
    let mut violations = Vec::new();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let v = g.get(k, i, j);
                let swap = (v.clone() - g.get(k, j, i).clone()).abs();
                if swap > *tol {
                    violations.push(TrilinearViolation {
                        k,
                        i,
                        j,
                        relation: TrilinearRelation::LowerSwap,
                        residual: swap,
                    });
                }
                let exchange = (v.clone() - g.get(i, k, j).clone()).abs();
                if exchange > *tol {
                    violations.push(TrilinearViolation {
                        k,
                        i,
                        j,
                        relation: TrilinearRelation::UpperExchange,
                        residual: exchange,
                    });
                }
            }
        }
    }
    ValidityReport { violations }
}

/// The `(α, β, γ, λ)` family. `β` and `γ` are indexed by `(k, l)` with an
/// offset `l ≠ 0`; `λ` is indexed by absolute components `(k, a, a')` with
/// `a ≠ a'` and both different from `k`, i.e. `a = k - l`, `a' = k - l'`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelCoefficients<T> {
    components: usize,
    alpha: Vec<T>,
    beta: Vec<T>,
    gamma: Vec<T>,
    lambda: Vec<T>,
}

/// A single compatibility condition between model coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelCondition {
    /// `β_k^a = 2 γ_{k+a}^a`
    BetaGamma { k: usize, a: usize },
    /// `λ_k^{k-a,k-a'} = λ_k^{k-a',k-a}`
    LambdaSwap { k: usize, a: usize, a_prime: usize },
    /// `λ_k^{k-a,k-a'} = λ_{k-a}^{k,k-a'}`
    LambdaShift { k: usize, a: usize, a_prime: usize },
}

impl fmt::Display for ModelCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ModelCondition::BetaGamma { k, a } => {
                write!(f, "beta_{k}^{a} = 2 gamma_(k+a)^{a} (k={k}, a={a})")
            }
            ModelCondition::LambdaSwap { k, a, a_prime } => write!(
                f,
                "lambda_k^(k-a,k-a') = lambda_k^(k-a',k-a) (k={k}, a={a}, a'={a_prime})"
            ),
            ModelCondition::LambdaShift { k, a, a_prime } => write!(
                f,
                "lambda_k^(k-a,k-a') = lambda_(k-a)^(k,k-a') (k={k}, a={a}, a'={a_prime})"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintViolation<T> {
    pub condition: ModelCondition,
    pub residual: T,
}

impl<T: Scalar> ModelCoefficients<T> {
    pub fn zeros(components: usize) -> Result<Self> {
        if components == 0 {
            return Err(Error::Dimension("model coefficients need K >= 1".into()));
        }
        let n = components;
        Ok(Self {
            components,
            alpha: vec![T::zero(); n],
            beta: vec![T::zero(); n * n],
            gamma: vec![T::zero(); n * n],
            lambda: vec![T::zero(); n * n * n],
        })
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn alpha(&self, k: usize) -> &T {
        &self.alpha[k % self.components]
    }

    /// `β_k^l`; zero for `l ≡ 0`.
    pub fn beta(&self, k: usize, l: usize) -> &T {
        let n = self.components;
        &self.beta[(k % n) * n + l % n]
    }

    /// `γ_k^l`; zero for `l ≡ 0`.
    pub fn gamma(&self, k: usize, l: usize) -> &T {
        let n = self.components;
        &self.gamma[(k % n) * n + l % n]
    }

    /// `λ_k^{a,a'}` with absolute component indices.
    pub fn lambda(&self, k: usize, a: usize, a_prime: usize) -> &T {
        let n = self.components;
        &self.lambda[((k % n) * n + a % n) * n + a_prime % n]
    }

    /// `λ_k^{k-l,k-l'}` addressed by offsets, as it appears in the drift sum.
    pub fn lambda_by_offsets(&self, k: usize, l: usize, l_prime: usize) -> &T {
        let n = self.components;
        let k = (k % n) as isize;
        self.lambda(k as usize, wrap(k - l as isize, n), wrap(k - l_prime as isize, n))
    }

    fn check_value(&self, what: &str, v: &T) -> Result<()> {
        if v.is_finite_value() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("non-finite {what} entry")))
        }
    }

    pub fn set_alpha(&mut self, k: usize, v: T) -> Result<()> {
        self.check_value("alpha", &v)?;
        let k = self.index(k)?;
        self.alpha[k] = v;
        Ok(())
    }

    pub fn set_beta(&mut self, k: usize, l: usize, v: T) -> Result<()> {
        self.check_value("beta", &v)?;
        let (k, l) = (self.index(k)?, self.index(l)?);
        if l == 0 {
            return Err(Error::InvalidParameter("beta offset l must be nonzero".into()));
        }
        let n = self.components;
        self.beta[k * n + l] = v;
        Ok(())
    }

    pub fn set_gamma(&mut self, k: usize, l: usize, v: T) -> Result<()> {
        self.check_value("gamma", &v)?;
        let (k, l) = (self.index(k)?, self.index(l)?);
        if l == 0 {
            return Err(Error::InvalidParameter("gamma offset l must be nonzero".into()));
        }
        let n = self.components;
        self.gamma[k * n + l] = v;
        Ok(())
    }

    /// Sets `λ_k^{a,a'}`. Diagonal entries `a = a'` are rejected, as are
    /// entries with `a = k` or `a' = k` (they correspond to a zero offset).
    pub fn set_lambda(&mut self, k: usize, a: usize, a_prime: usize, v: T) -> Result<()> {
        self.check_value("lambda", &v)?;
        let (k, a, a_prime) = (self.index(k)?, self.index(a)?, self.index(a_prime)?);
        if a == a_prime {
            return Err(Error::DiagonalLambda { k, a });
        }
        if a == k || a_prime == k {
            return Err(Error::InvalidParameter(format!(
                "lambda_{k}^({a},{a_prime}) would use a zero offset"
            )));
        }
        let n = self.components;
        self.lambda[(k * n + a) * n + a_prime] = v;
        Ok(())
    }

    fn index(&self, i: usize) -> Result<usize> {
        if i < self.components {
            Ok(i)
        } else {
            Err(Error::Dimension(format!(
                "component index {i} out of range for K={}",
                self.components
            )))
        }
    }

    /// Legal `(k, a, a')` index triples of the λ family.
    pub fn lambda_indices(&self) -> impl Iterator<Item = (usize, usize, usize)> {
        let n = self.components;
        (0..n).flat_map(move |k| {
            (0..n).flat_map(move |a| {
                (0..n)
                    .filter(move |&b| a != k && b != k && b != a)
                    .map(move |b| (k, a, b))
            })
        })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> ModelCoefficients<U> {
        ModelCoefficients {
            components: self.components,
            alpha: self.alpha.iter().map(&f).collect(),
            beta: self.beta.iter().map(&f).collect(),
            gamma: self.gamma.iter().map(&f).collect(),
            lambda: self.lambda.iter().map(&f).collect(),
        }
    }

    pub fn to_f64(&self) -> ModelCoefficients<f64> {
        self.map(|v| v.to_f64())
    }
}

/// Checks the `β/γ` and `λ` compatibility conditions entrywise within `tol`.
pub fn check_model_constraints<T: Scalar>(c: &ModelCoefficients<T>, tol: &T) -> ValidityReport<ConstraintViolation<T>> {
    let n = c.components();
    let two = T::from_i64(2);
    let mut violations = Vec::new();
    for k in 0..n {
        for a in 1..n {
            let residual = (c.beta(k, a).clone() - two.clone() * c.gamma(k + a, a).clone()).abs();
            if residual > *tol {
                violations.push(ConstraintViolation {
                    condition: ModelCondition::BetaGamma { k, a },
                    residual,
                });
            }
        }
    }
    for k in 0..n {
        for a in 1..n {
            for a_prime in (1..n).filter(|&b| b != a) {
                let ka = wrap(k as isize - a as isize, n);
                let kb = wrap(k as isize - a_prime as isize, n);
                let base = c.lambda(k, ka, kb);
                let swap = (base.clone() - c.lambda(k, kb, ka).clone()).abs();
                if swap > *tol {
                    violations.push(ConstraintViolation {
                        condition: ModelCondition::LambdaSwap { k, a, a_prime },
                        residual: swap,
                    });
                }
                let shift = (base.clone() - c.lambda(ka, k, kb).clone()).abs();
                if shift > *tol {
                    violations.push(ConstraintViolation {
                        condition: ModelCondition::LambdaShift { k, a, a_prime },
                        residual: shift,
                    });
                }
            }
        }
    }
    ValidityReport { violations }
}

/// Reads off the model coefficients of a trilinear tensor.
pub fn gamma_to_model<T: Scalar>(g: &GammaTensor<T>, tol: &T) -> Result<ModelCoefficients<T>> {
    let report = check_trilinear(g, tol);
    if let Some(first) = report.violations.first() {
        return Err(Error::NotTrilinear {
            count: report.violations.len(),
            k: first.k,
            i: first.i,
            j: first.j,
        });
    }
    let n = g.components();
    let two = T::from_i64(2);
    let mut c = ModelCoefficients::zeros(n)?;
    for k in 0..n {
        c.alpha[k] = g.get(k, k, k).clone();
        for l in 1..n {
            c.beta[k * n + l] = two.clone() * g.get(k, k, k + l).clone();
            let kl = wrap(k as isize - l as isize, n);
            c.gamma[k * n + l] = g.get(k, kl, kl).clone();
        }
    }
    let triples: Vec<_> = c.lambda_indices().collect();
    for (k, a, b) in triples {
        c.lambda[(k * n + a) * n + b] = g.get(k, a, b).clone();
    }
    Ok(c)
}

/// Inverse identification; the result is a trilinear tensor.
pub fn model_to_gamma<T: Scalar>(c: &ModelCoefficients<T>, tol: &T) -> Result<GammaTensor<T>> {
    let report = check_model_constraints(c, tol);
    if let Some(first) = report.violations.first() {
        return Err(Error::ConstraintViolated(format!(
            "{} ({} violations)",
            first.condition,
            report.violations.len()
        )));
    }
    let n = c.components();
    GammaTensor::from_fn(n, |k, i, j| {
        if i == k && j == k {
            c.alpha(k).clone()
        } else if i == k {
            // Γ^k_{k,k+l} with l = j - k
            c.beta(k, wrap(j as isize - k as isize, n)).half()
        } else if j == k {
            c.beta(k, wrap(i as isize - k as isize, n)).half()
        } else if i == j {
            // Γ^k_{k-l,k-l} with l = k - i
            c.gamma(k, wrap(k as isize - i as isize, n)).clone()
        } else {
            c.lambda(k, i, j).clone()
        }
    })
}

/// A random admissible coefficient set with small rational entries, built by
/// symmetrizing a random tensor. Meant for tests and examples.
pub fn random_admissible_model(components: usize, rng: &mut impl rand::Rng) -> Result<ModelCoefficients<Rational>> {
    let g = GammaTensor::from_fn(components, |_, _, _| {
        Rational::new(rng.random_range(-9i64..=9).into(), rng.random_range(1i64..=7).into())
    })?;
    gamma_to_model(&g.symmetrized(), &Rational::default())
}

/// Either parametrization, as read from a coefficients document.
#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientSet<T> {
    Tensor(GammaTensor<T>),
    Model(ModelCoefficients<T>),
}

impl<T: Scalar> CoefficientSet<T> {
    pub fn components(&self) -> usize {
        match self {
            CoefficientSet::Tensor(g) => g.components(),
            CoefficientSet::Model(c) => c.components(),
        }
    }

    /// Resolves to model coefficients, converting a tensor if needed.
    pub fn into_model(self, tol: &T) -> Result<ModelCoefficients<T>> {
        match self {
            CoefficientSet::Tensor(g) => gamma_to_model(&g, tol),
            CoefficientSet::Model(c) => Ok(c),
        }
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidParameter("coefficients document must be an object".into()))?;
        let components = obj
            .get("K")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidParameter("missing positive integer field \"K\"".into()))?
            as usize;
        if components == 0 {
            return Err(Error::Dimension("K must be >= 1".into()));
        }
        if let Some(tensor) = obj.get("gamma_tensor") {
            let nested = parse_nested::<T>(tensor)?;
            if nested.len() != components {
                return Err(Error::Dimension(format!(
                    "gamma_tensor has {} planes but K={components}",
                    nested.len()
                )));
            }
            return Ok(CoefficientSet::Tensor(GammaTensor::from_nested(nested)?));
        }
        let mut c = ModelCoefficients::zeros(components)?;
        if let Some(alpha) = obj.get("alpha") {
            let list = alpha
                .as_array()
                .ok_or_else(|| Error::InvalidParameter("\"alpha\" must be an array".into()))?;
            if list.len() != components {
                return Err(Error::Dimension(format!(
                    "alpha has {} entries but K={components}",
                    list.len()
                )));
            }
            for (k, v) in list.iter().enumerate() {
                c.set_alpha(k, T::from_json(v)?)?;
            }
        }
        for (field, arity) in [("beta", 2), ("gamma", 2), ("lambda", 3)] {
            let Some(family) = obj.get(field) else { continue };
            let map = family
                .as_object()
                .ok_or_else(|| Error::InvalidParameter(format!("\"{field}\" must be an object")))?;
            for (key, v) in map {
                let idx = parse_key(key, arity)?;
                let v = T::from_json(v)?;
                match field {
                    "beta" => c.set_beta(idx[0], idx[1], v)?,
                    "gamma" => c.set_gamma(idx[0], idx[1], v)?,
                    _ => c.set_lambda(idx[0], idx[1], idx[2], v)?,
                }
            }
        }
        Ok(CoefficientSet::Model(c))
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("K".into(), Value::from(self.components()));
        match self {
            CoefficientSet::Tensor(g) => {
                let nested = g
                    .to_nested()
                    .into_iter()
                    .map(|plane| {
                        Value::Array(
                            plane
                                .into_iter()
                                .map(|row| Value::Array(row.iter().map(Scalar::to_json).collect()))
                                .collect(),
                        )
                    })
                    .collect();
                obj.insert("gamma_tensor".into(), Value::Array(nested));
            }
            CoefficientSet::Model(c) => {
                let n = c.components();
                obj.insert(
                    "alpha".into(),
                    Value::Array((0..n).map(|k| c.alpha(k).to_json()).collect()),
                );
                let mut beta = Map::new();
                let mut gamma = Map::new();
                for k in 0..n {
                    for l in 1..n {
                        if !c.beta(k, l).is_zero() {
                            beta.insert(format!("{k},{l}"), c.beta(k, l).to_json());
                        }
                        if !c.gamma(k, l).is_zero() {
                            gamma.insert(format!("{k},{l}"), c.gamma(k, l).to_json());
                        }
                    }
                }
                let mut lambda = Map::new();
                for (k, a, b) in c.lambda_indices() {
                    if !c.lambda(k, a, b).is_zero() {
                        lambda.insert(format!("{k},{a},{b}"), c.lambda(k, a, b).to_json());
                    }
                }
                obj.insert("beta".into(), Value::Object(beta));
                obj.insert("gamma".into(), Value::Object(gamma));
                obj.insert("lambda".into(), Value::Object(lambda));
            }
        }
        Value::Object(obj)
    }
}

fn parse_nested<T: Scalar>(value: &Value) -> Result<Vec<Vec<Vec<T>>>> {
    let bad = || Error::InvalidParameter("gamma_tensor must be a K x K x K nested array".into());
    value
        .as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|plane| {
            plane
                .as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|row| row.as_array().ok_or_else(bad)?.iter().map(T::from_json).collect())
                .collect()
        })
        .collect()
}

fn parse_key(key: &str, arity: usize) -> Result<Vec<usize>> {
    let parts: Vec<usize> = key
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidParameter(format!("bad index key {key:?}")))?;
    if parts.len() != arity {
        return Err(Error::InvalidParameter(format!(
            "index key {key:?} needs {arity} components"
        )));
    }
    Ok(parts)
}

/// Exact copy of floating coefficients (binary values, not decimal).
pub fn model_to_exact(c: &ModelCoefficients<f64>) -> ModelCoefficients<Rational> {
    c.map(|v| Rational::from_float(*v).unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rational_tensor(n: usize, rng: &mut impl Rng) -> GammaTensor<Rational> {
        GammaTensor::from_fn(n, |_, _, _| ratio(rng.random_range(-9..=9), rng.random_range(1..=7))).unwrap()
    }

    #[test]
    fn single_component_is_always_trilinear() {
        for c in [-3.0, 0.0, 2.5] {
            let g = GammaTensor::from_fn(1, |_, _, _| c).unwrap();
            assert!(check_trilinear(&g, &DEFAULT_TOLERANCE).is_valid());
        }
    }

    #[test]
    fn detects_exchange_violation() {
        // Γ^0_{0,1} = Γ^0_{1,0} = 0.5 but Γ^1_{0,0} = 0.3
        let mut g = GammaTensor::<f64>::zeros(2).unwrap();
        g.set(0, 0, 1, 0.5);
        g.set(0, 1, 0, 0.5);
        g.set(1, 0, 0, 0.3);
        let report = check_trilinear(&g, &DEFAULT_TOLERANCE);
        assert!(!report.is_valid());
        let hit = report
            .violations
            .iter()
            .find(|v| (v.k, v.i, v.j) == (0, 1, 0) && v.relation == TrilinearRelation::UpperExchange)
            .expect("exchange violation at (0,1,0)");
        assert!((hit.residual - 0.2).abs() < 1e-15);
    }

    #[test]
    fn symmetrized_random_tensor_is_trilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_rational_tensor(3, &mut rng);
        assert!(!check_trilinear(&g, &Rational::zero()).is_valid());
        assert!(check_trilinear(&g.symmetrized(), &Rational::zero()).is_valid());
    }

    #[test]
    fn single_component_model_has_no_constraints() {
        let mut c = ModelCoefficients::<f64>::zeros(1).unwrap();
        c.set_alpha(0, 7.0).unwrap();
        assert!(check_model_constraints(&c, &0.0).is_valid());
    }

    #[test]
    fn beta_gamma_condition() {
        let mut c = ModelCoefficients::<f64>::zeros(2).unwrap();
        c.set_beta(0, 1, 1.0).unwrap();
        c.set_gamma(1, 1, 0.5).unwrap();
        assert!(check_model_constraints(&c, &DEFAULT_TOLERANCE).is_valid());

        c.set_gamma(1, 1, 0.4).unwrap();
        let report = check_model_constraints(&c, &DEFAULT_TOLERANCE);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].condition, ModelCondition::BetaGamma { k: 0, a: 1 });
        assert!((report.violations[0].residual - 0.2).abs() < 1e-15);
    }

    #[test]
    fn identification_examples() {
        let g = GammaTensor::from_fn(1, |_, _, _| 2.0).unwrap();
        let c = gamma_to_model(&g, &DEFAULT_TOLERANCE).unwrap();
        assert_eq!(*c.alpha(0), 2.0);

        // β_1^1 / 2 = Γ^1_{1,0}
        let mut g = GammaTensor::<f64>::zeros(2).unwrap();
        for (k, i, j) in [(1, 1, 0), (1, 0, 1), (0, 1, 1)] {
            g.set(k, i, j, 0.5);
        }
        let c = gamma_to_model(&g, &DEFAULT_TOLERANCE).unwrap();
        assert_eq!(*c.beta(1, 1), 1.0);
        assert_eq!(*c.gamma(0, 1), 0.5);

        let mut c = ModelCoefficients::<f64>::zeros(1).unwrap();
        c.set_alpha(0, 1.0).unwrap();
        assert_eq!(*model_to_gamma(&c, &0.0).unwrap().get(0, 0, 0), 1.0);

        // γ_1^1 = Γ^1_{0,0}; β_0^1 = 2 γ_1^1 is required for validity.
        let mut c = ModelCoefficients::<f64>::zeros(2).unwrap();
        c.set_gamma(1, 1, 0.5).unwrap();
        c.set_beta(0, 1, 1.0).unwrap();
        let g = model_to_gamma(&c, &DEFAULT_TOLERANCE).unwrap();
        assert_eq!(*g.get(1, 0, 0), 0.5);
        assert!(check_trilinear(&g, &0.0).is_valid());
    }

    #[test]
    fn conversions_reject_invalid_inputs() {
        let mut g = GammaTensor::<f64>::zeros(2).unwrap();
        g.set(0, 0, 1, 1.0);
        assert!(matches!(
            gamma_to_model(&g, &DEFAULT_TOLERANCE),
            Err(Error::NotTrilinear { .. })
        ));
        let mut c = ModelCoefficients::<f64>::zeros(2).unwrap();
        c.set_beta(0, 1, 1.0).unwrap();
        assert!(matches!(
            model_to_gamma(&c, &DEFAULT_TOLERANCE),
            Err(Error::ConstraintViolated(_))
        ));
    }

    #[test]
    fn lambda_index_rules() {
        let mut c = ModelCoefficients::<f64>::zeros(3).unwrap();
        assert!(matches!(c.set_lambda(0, 1, 1, 1.0), Err(Error::DiagonalLambda { .. })));
        assert!(c.set_lambda(0, 0, 1, 1.0).is_err());
        assert!(c.set_lambda(0, 1, 2, 1.0).is_ok());
        assert_eq!(c.lambda_indices().count(), 6);
        // λ_0^{0-1,0-2} = λ_0^{2,1}
        c.set_lambda(0, 2, 1, 4.0).unwrap();
        assert_eq!(*c.lambda_by_offsets(0, 1, 2), 4.0);
    }

    #[test]
    fn rejects_diagonal_lambda_in_json() {
        let doc = serde_json::json!({"K": 3, "lambda": {"0,1,1": 1.0}});
        assert!(matches!(
            CoefficientSet::<f64>::from_json(&doc),
            Err(Error::DiagonalLambda { k: 0, a: 1 })
        ));
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let doc = serde_json::json!({
            "K": 3,
            "alpha": [0.1, -0.25, 3],
            "beta": {"0,1": 0.2, "2,2": 1e-7},
            "gamma": {"1,1": 0.1},
            "lambda": {"0,1,2": 0.3, "0,2,1": 0.3}
        });
        let set = CoefficientSet::<f64>::from_json(&doc).unwrap();
        let text = serde_json::to_string(&set.to_json()).unwrap();
        let back = CoefficientSet::<f64>::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(set, back);

        let exact = CoefficientSet::<Rational>::from_json(&doc).unwrap();
        let CoefficientSet::Model(c) = &exact else { panic!() };
        assert_eq!(*c.alpha(0), ratio(1, 10));
        let back = CoefficientSet::<Rational>::from_json(&exact.to_json()).unwrap();
        assert_eq!(exact, back);

        let tensor =
            CoefficientSet::Tensor(GammaTensor::from_fn(2, |k, i, j| (k + 2 * i + 4 * j) as f64 / 10.0).unwrap());
        let back = CoefficientSet::<f64>::from_json(&tensor.to_json()).unwrap();
        assert_eq!(tensor, back);
    }
}
