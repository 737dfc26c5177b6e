use serde_json::{json, Value};

use crate::coefficients::{check_model_constraints, CoefficientSet, ModelCoefficients};
use crate::error::{Error, Result};
use crate::rational::{Rational, Scalar};

/// Model coefficients, asymmetry strength `ε` and lattice size `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorParams<T> {
    coefficients: ModelCoefficients<T>,
    epsilon: T,
    sites: usize,
}

impl<T: Scalar> GeneratorParams<T> {
    /// Validates the coefficient constraints within `tol` (use zero for
    /// exact coefficients).
    pub fn new(coefficients: ModelCoefficients<T>, epsilon: T, sites: usize, tol: &T) -> Result<Self> {
        let report = check_model_constraints(&coefficients, tol);
        if let Some(v) = report.violations.first() {
            return Err(Error::ConstraintViolated(v.condition.to_string()));
        }
        Self::new_unchecked(coefficients, epsilon, sites)
    }

    /// Skips the constraint check. Needed to exhibit what goes wrong for
    /// coefficient sets off the admissible manifold.
    pub fn new_unchecked(coefficients: ModelCoefficients<T>, epsilon: T, sites: usize) -> Result<Self> {
        if sites == 0 {
            return Err(Error::Dimension("lattice size M must be >= 1".into()));
        }
        if !epsilon.is_finite_value() {
            return Err(Error::InvalidParameter("epsilon must be finite".into()));
        }
        Ok(Self {
            coefficients,
            epsilon,
            sites,
        })
    }

    pub fn coefficients(&self) -> &ModelCoefficients<T> {
        &self.coefficients
    }

    pub fn epsilon(&self) -> &T {
        &self.epsilon
    }

    pub fn components(&self) -> usize {
        self.coefficients.components()
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn with_epsilon(&self, epsilon: T) -> Self {
        Self {
            epsilon,
            ..self.clone()
        }
    }

    pub fn with_sites(&self, sites: usize) -> Result<Self> {
        Self::new_unchecked(self.coefficients.clone(), self.epsilon.clone(), sites)
    }

    pub fn to_f64(&self) -> GeneratorParams<f64> {
        GeneratorParams {
            coefficients: self.coefficients.to_f64(),
            epsilon: self.epsilon.to_f64(),
            sites: self.sites,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "K": self.components(),
            "M": self.sites,
            "epsilon": self.epsilon.to_json(),
            "coefficients": CoefficientSet::Model(self.coefficients.clone()).to_json(),
        })
    }

    pub fn from_json(value: &Value, tol: &T) -> Result<Self> {
        let sites = value
            .get("M")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidParameter("missing \"M\"".into()))? as usize;
        let epsilon = T::from_json(
            value
                .get("epsilon")
                .ok_or_else(|| Error::InvalidParameter("missing \"epsilon\"".into()))?,
        )?;
        let coefficients = CoefficientSet::<T>::from_json(
            value
                .get("coefficients")
                .ok_or_else(|| Error::InvalidParameter("missing \"coefficients\"".into()))?,
        )?
        .into_model(tol)?;
        Self::new(coefficients, epsilon, sites, tol)
    }
}

impl GeneratorParams<Rational> {
    pub fn exact(coefficients: ModelCoefficients<Rational>, epsilon: Rational, sites: usize) -> Result<Self> {
        Self::new(coefficients, epsilon, sites, &Rational::default())
    }
}
