use clap::ValueEnum;
use serde_json::Value;

use ssburgers::coefficients::{model_to_gamma, CoefficientSet};
use ssburgers::Rational;

use crate::error::CliResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// `{"K", "gamma_tensor"}`
    Gamma,
    /// `{"K", "alpha", "beta", "gamma", "lambda"}`
    Coefficients,
}

/// Converts a coefficients document between the tensor and the
/// `(α, β, γ, λ)` forms, exactly. Both directions validate.
pub fn run(input: &Value, to: Target) -> CliResult<Value> {
    let zero = Rational::default();
    let model = CoefficientSet::<Rational>::from_json(input)?.into_model(&zero)?;
    let out = match to {
        Target::Gamma => CoefficientSet::Tensor(model_to_gamma(&model, &zero)?),
        Target::Coefficients => {
            model_to_gamma(&model, &zero)?;
            CoefficientSet::Model(model)
        }
    };
    Ok(out.to_json())
}
