use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use ssburgers::coefficients::{CoefficientSet, ModelCoefficients, DEFAULT_TOLERANCE};
use ssburgers::dynamics::{check_dt, steps_for_macroscopic_time};
use ssburgers::fields::TestFunction;
use ssburgers::rational::parse_rational;
use ssburgers::symbolic::GeneratorParams;
use ssburgers::Rational;

use crate::error::{CliError, CliResult};

pub const OUT_DIR_ENV: &str = "SSBURGERS_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "ssburgers-out";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpsilonMode {
    /// `ε = n^{-1/2}`
    #[serde(rename = "weak-asymmetry")]
    WeakAsymmetry,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Epsilon {
    Mode(EpsilonMode),
    Fixed(f64),
    /// Exact literal such as `"1/3"`.
    Literal(String),
}

impl Default for Epsilon {
    fn default() -> Self {
        Epsilon::Mode(EpsilonMode::WeakAsymmetry)
    }
}

impl Epsilon {
    pub fn value(&self, n: usize) -> CliResult<f64> {
        match self {
            Epsilon::Mode(EpsilonMode::WeakAsymmetry) => Ok((n as f64).powf(-0.5)),
            Epsilon::Fixed(v) => Ok(*v),
            Epsilon::Literal(s) => Ok(ssburgers::rational::Scalar::to_f64(&parse_rational(s)?)),
        }
    }

    /// Exact value for the symbolic checks. `n^{-1/2}` is irrational, so the
    /// weak-asymmetry mode is checked at `ε = 1`; every identity checked is
    /// either independent of `ε` or linear in it.
    pub fn exact(&self) -> CliResult<Rational> {
        match self {
            Epsilon::Mode(EpsilonMode::WeakAsymmetry) => Ok(ssburgers::rational::ratio(1, 1)),
            Epsilon::Fixed(v) => Ok(parse_rational(&v.to_string())?),
            Epsilon::Literal(s) => Ok(parse_rational(s)?),
        }
    }
}

fn default_dt() -> f64 {
    ssburgers::dynamics::DEFAULT_DT
}

fn default_stride() -> u64 {
    10
}

fn default_test_functions() -> Vec<String> {
    vec!["cos1".into()]
}

fn default_ensemble_size() -> usize {
    100
}

fn default_verify_m() -> usize {
    4
}

/// One JSON document describing a run. Every output embeds the resolved
/// copy, and any output can be fed back as `--config`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Coefficients document: `{"K", "alpha", "beta", "gamma", "lambda"}`
    /// or `{"K", "gamma_tensor"}`. Entries may be numbers or exact strings.
    pub model: Value,
    /// Lattice size, `M = n`.
    pub n: usize,
    #[serde(default)]
    pub epsilon: Epsilon,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Macroscopic horizon `T`.
    pub horizon: f64,
    #[serde(default = "default_stride")]
    pub stride: u64,
    #[serde(default = "default_test_functions")]
    pub test_functions: Vec<String>,
    #[serde(default = "default_ensemble_size")]
    pub ensemble_size: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Lattice size for the exact checks of `verify`.
    #[serde(default = "default_verify_m")]
    pub verify_m: usize,
}

/// Command-line overrides applied on top of a config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub horizon: Option<f64>,
    pub dt: Option<f64>,
    pub stride: Option<u64>,
    pub ensemble_size: Option<usize>,
    pub base_seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub verify_m: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_value(v: &Value) -> CliResult<Self> {
        // outputs carry the config under "config"
        let v = v.get("config").unwrap_or(v);
        serde_json::from_value(v.clone()).map_err(|e| CliError::Config(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_value(&v)
    }

    pub fn apply(mut self, o: &Overrides) -> Self {
        if let Some(v) = o.n {
            self.n = v;
        }
        if let Some(v) = o.horizon {
            self.horizon = v;
        }
        if let Some(v) = o.dt {
            self.dt = v;
        }
        if let Some(v) = o.stride {
            self.stride = v;
        }
        if let Some(v) = o.ensemble_size {
            self.ensemble_size = v;
        }
        if let Some(v) = o.base_seed {
            self.base_seed = v;
        }
        if let Some(v) = &o.output_dir {
            self.output_dir = Some(v.clone());
        }
        if let Some(v) = o.verify_m {
            self.verify_m = v;
        }
        self
    }

    /// Fills in the output directory from the environment or the default.
    pub fn resolve(mut self) -> Self {
        if self.output_dir.is_none() {
            let dir = std::env::var_os(OUT_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
            self.output_dir = Some(dir);
        }
        self
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }

    pub fn exact_model(&self) -> CliResult<ModelCoefficients<Rational>> {
        Ok(CoefficientSet::<Rational>::from_json(&self.model)?.into_model(&Rational::default())?)
    }

    pub fn model_f64(&self) -> CliResult<ModelCoefficients<f64>> {
        Ok(CoefficientSet::<f64>::from_json(&self.model)?.into_model(&DEFAULT_TOLERANCE)?)
    }

    /// Floating parameters on a lattice of size `n`, constraints checked.
    pub fn params(&self, n: usize) -> CliResult<GeneratorParams<f64>> {
        Ok(GeneratorParams::new(
            self.model_f64()?,
            self.epsilon.value(n)?,
            n,
            &DEFAULT_TOLERANCE,
        )?)
    }

    pub fn test_functions(&self) -> CliResult<Vec<TestFunction>> {
        self.test_functions
            .iter()
            .map(|id| TestFunction::parse(id).map_err(CliError::from))
            .collect()
    }

    pub fn n_steps(&self) -> u64 {
        steps_for_macroscopic_time(self.horizon, self.n, self.dt)
    }

    /// Checks everything the numeric commands need before any run starts.
    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.n < 2 {
            return bad(format!("n must be >= 2, got {}", self.n));
        }
        check_dt(self.dt)?;
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be finite and >= 0, got {}", self.horizon));
        }
        if self.stride == 0 {
            return bad("stride must be >= 1".into());
        }
        if self.ensemble_size == 0 {
            return bad("ensemble_size must be >= 1".into());
        }
        if self.test_functions.is_empty() {
            return bad("test_functions must not be empty".into());
        }
        let eps = self.epsilon.value(self.n)?;
        if !eps.is_finite() {
            return bad(format!("epsilon must be finite, got {eps}"));
        }
        self.test_functions()?;
        self.params(self.n)?;
        Ok(())
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
