use std::fs::File;
use std::io::{BufWriter, Write};
use std::str::FromStr;

use clap::ValueEnum;
use serde_json::{json, Value};

use ssburgers::fields::{
    window_for_epsilon, write_csv, FieldRecord, Functional, QuadraticKernel, TestFunction, Weight,
};
use ssburgers::seeding::derive_seed;
use ssburgers::stats::{run_ensemble, scaling_fit, EnsembleResult, Execution, Experiment};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Bg,
    CrossedBg,
    Y,
    Ec,
    Qv,
}

impl Quantity {
    fn tag(self) -> &'static str {
        match self {
            Quantity::Bg => "bg",
            Quantity::CrossedBg => "crossed-bg",
            Quantity::Y => "y",
            Quantity::Ec => "ec",
            Quantity::Qv => "qv",
        }
    }

    fn default_target(self) -> (f64, f64) {
        match self {
            Quantity::Bg | Quantity::CrossedBg | Quantity::Y => (-1.0, 0.3),
            // r/ε at fixed ε does not depend on n
            Quantity::Ec => (0.0, 0.3),
            // relative tolerance on the ratio at each n
            Quantity::Qv => (1.0, 0.05),
        }
    }
}

/// Window length as a function of `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LRule {
    Fixed(usize),
    /// `l = ε n`, which must be an integer.
    Epsilon(f64),
    /// `l = round(√t n)`.
    SqrtT,
}

impl FromStr for LRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "sqrt-t" {
            return Ok(LRule::SqrtT);
        }
        if let Some(v) = s.strip_prefix("fixed:") {
            return v.parse().map(LRule::Fixed).map_err(|e| format!("{s}: {e}"));
        }
        if let Some(v) = s.strip_prefix("eps:") {
            return v.parse().map(LRule::Epsilon).map_err(|e| format!("{s}: {e}"));
        }
        Err(format!("unknown l rule {s:?}; use fixed:<l>, eps:<ε> or sqrt-t"))
    }
}

impl LRule {
    pub fn window(self, n: usize, t: f64) -> CliResult<usize> {
        let l = match self {
            LRule::Fixed(l) => l,
            LRule::Epsilon(e) => window_for_epsilon(e, n)?,
            LRule::SqrtT => ((t.sqrt() * n as f64).round() as usize).max(1),
        };
        if l == 0 {
            return Err(CliError::Config("window length must be >= 1".into()));
        }
        Ok(l)
    }

    fn describe(self) -> String {
        match self {
            LRule::Fixed(l) => format!("fixed:{l}"),
            LRule::Epsilon(e) => format!("eps:{e}"),
            LRule::SqrtT => "sqrt-t".into(),
        }
    }
}

pub struct ScanOptions {
    pub quantity: Quantity,
    pub n_list: Vec<usize>,
    pub l_rule: LRule,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
}

fn functionals(q: Quantity, phi: &TestFunction, components: usize, l: usize) -> CliResult<Vec<Functional>> {
    let w = Weight::Gradient;
    let ks = 0..components;
    Ok(match q {
        Quantity::Bg => ks
            .map(|k| Functional::BoltzmannGibbs {
                phi: phi.clone(),
                k,
                l,
                weight: w,
            })
            .collect(),
        Quantity::CrossedBg => {
            if components < 2 {
                return Err(CliError::Config("crossed-bg needs K >= 2".into()));
            }
            ks.map(|k| Functional::CrossedBoltzmannGibbs {
                phi: phi.clone(),
                k,
                k_bar: (k + 1) % components,
                l,
                weight: w,
            })
            .collect()
        }
        Quantity::Y => ks
            .map(|k| Functional::YRemainder {
                phi: phi.clone(),
                k,
                weight: w,
            })
            .collect(),
        Quantity::Qv => ks.map(|k| Functional::Martingale { phi: phi.clone(), k }).collect(),
        Quantity::Ec => {
            if !l.is_multiple_of(4) {
                return Err(CliError::Config(format!(
                    "ec compares windows l and l/4; l = {l} is not a multiple of 4"
                )));
            }
            ks.flat_map(|k| {
                [l, l / 4].map(|ll| Functional::Quadratic {
                    phi: phi.clone(),
                    i: k,
                    j: k,
                    l: ll,
                    kernel: QuadraticKernel::BackwardForward,
                })
            })
            .collect()
        }
    })
}

struct Point {
    n: usize,
    l: usize,
    value: f64,
    standard_error: f64,
    samples: usize,
    records: Vec<FieldRecord>,
}

/// Per-trajectory samples whose mean is the scanned quantity, pooled over
/// components.
fn samples(q: Quantity, results: &[EnsembleResult], norm: f64) -> Vec<f64> {
    match q {
        Quantity::Ec => results
            .chunks(2)
            .flat_map(|pair| {
                pair[0]
                    .values
                    .iter()
                    .zip(&pair[1].values)
                    .map(|(a, b)| (a - b).powi(2) / norm)
                    .collect::<Vec<_>>()
            })
            .collect(),
        Quantity::Qv => results
            .iter()
            .flat_map(|r| {
                let mean = r.mean;
                r.values.iter().map(move |v| (v - mean).powi(2) / norm)
            })
            .collect(),
        _ => results.iter().flat_map(|r| r.values.iter().map(|v| v * v)).collect(),
    }
}

pub fn run(config: &ExperimentConfig, opts: &ScanOptions) -> CliResult<(Outcome, Value, String)> {
    if opts.n_list.len() < 3 {
        return Err(CliError::Config(format!(
            "scan needs at least 3 lattice sizes, got {}",
            opts.n_list.len()
        )));
    }
    config.validate()?;
    let phi = config.test_functions()?.remove(0);
    let t = config.horizon;
    let (default_target, default_tol) = opts.quantity.default_target();
    let target = opts.expected.unwrap_or(default_target);
    let tol = opts.tolerance.unwrap_or(default_tol);

    let mut points = Vec::new();
    for (idx, &n) in opts.n_list.iter().enumerate() {
        let params = config.params(n)?;
        let l = match opts.quantity {
            Quantity::Qv | Quantity::Y => 1,
            _ => opts.l_rule.window(n, t)?,
        };
        let fs = functionals(opts.quantity, &phi, params.components(), l)?;
        let exp = Experiment::new(params, config.dt, t, config.stride, fs)?;
        let seed = config.base_seed.wrapping_add(idx as u64);
        let results = run_ensemble(&exp, config.ensemble_size, seed, Execution::default())?;
        let grid = phi.on_grid(n)?;
        let norm = match opts.quantity {
            Quantity::Qv | Quantity::Ec => t * grid.gradient_energy(),
            _ => 1.0,
        };
        let norm = if opts.quantity == Quantity::Ec {
            norm * l as f64 / n as f64
        } else {
            norm
        };
        let s = samples(opts.quantity, &results, norm);
        let pooled = EnsembleResult::from_values(opts.quantity.tag(), s, results[0].fingerprint.clone());
        let mut records = Vec::new();
        for r in &results {
            for (i, v) in r.values.iter().enumerate() {
                records.push(FieldRecord {
                    seed: derive_seed(seed, i as u64),
                    n,
                    components: exp.params.components(),
                    k: label_component(&r.label),
                    phi_id: phi.id(),
                    l_or_eps: l as f64,
                    t,
                    value: *v,
                });
            }
        }
        points.push(Point {
            n,
            l,
            value: pooled.mean,
            standard_error: pooled.se_or_zero(),
            samples: pooled.n_samples,
            records,
        });
    }

    let point_json: Vec<Value> = points
        .iter()
        .map(
            |p| json!({"n": p.n, "l": p.l, "value": p.value, "standard_error": p.standard_error, "samples": p.samples}),
        )
        .collect();
    let (passed, verdict, fit) = if opts.quantity == Quantity::Qv {
        let ok = points.iter().all(|p| (p.value - target).abs() <= tol);
        let parts: Vec<String> = points.iter().map(|p| format!("n={}: {:.4}", p.n, p.value)).collect();
        (
            ok,
            format!("QV ratio {} (target {target} ± {tol})", parts.join(", ")),
            Value::Null,
        )
    } else if points.iter().all(|p| p.value == 0.0) {
        (true, "identically zero; fit skipped".to_string(), Value::Null)
    } else {
        let fit = scaling_fit(&points.iter().map(|p| (p.n as f64, p.value)).collect::<Vec<_>>())?;
        let ok = fit.slope_within(target, tol);
        (
            ok,
            format!(
                "slope {:.3} ± {:.3} (target {target} ± {tol})",
                fit.slope, fit.slope_standard_error
            ),
            serde_json::to_value(&fit)?,
        )
    };

    let dir = config.output_dir();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let tag = opts.quantity.tag();
    let csv_path = dir.join(format!("scan_{tag}.csv"));
    let mut w = BufWriter::new(File::create(&csv_path).map_err(|e| CliError::io(&csv_path, e))?);
    let records: Vec<FieldRecord> = points.iter().flat_map(|p| p.records.iter().cloned()).collect();
    write_csv(&records, &mut w)?;
    writeln!(w, "# config {}", config.to_value()).map_err(|e| CliError::io(&csv_path, e))?;
    w.flush().map_err(|e| CliError::io(&csv_path, e))?;

    let doc = json!({
        "command": "scan",
        "config": config.to_value(),
        "quantity": tag,
        "phi": phi.id(),
        "l_rule": opts.l_rule.describe(),
        "target": target,
        "tolerance": tol,
        "points": point_json,
        "fit": fit,
        "verdicts": [{"id": tag, "name": format!("{tag} scan"), "passed": passed, "summary": verdict,
                      "details": Value::Null, "seconds": 0.0}],
        "passed": passed,
    });
    let json_path = dir.join(format!("scan_{tag}.json"));
    std::fs::write(&json_path, serde_json::to_string_pretty(&doc)?).map_err(|e| CliError::io(&json_path, e))?;

    let mut text = String::new();
    for p in &points {
        text.push_str(&format!(
            "n={:<5} l={:<4} value={:.6e} ± {:.2e} ({} samples)\n",
            p.n, p.l, p.value, p.standard_error, p.samples
        ));
    }
    text.push_str(&format!("{} {tag}: {verdict}\n", if passed { "PASS" } else { "FAIL" }));
    Ok((Outcome::from_passed(passed), doc, text))
}

/// Component index from a functional label (`k=…` or `i=…`).
fn label_component(label: &str) -> usize {
    label
        .split([',', '[', ']'])
        .find_map(|p| p.strip_prefix("k=").or_else(|| p.strip_prefix("i=")))
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l_rules() {
        assert_eq!("fixed:4".parse::<LRule>().unwrap(), LRule::Fixed(4));
        assert_eq!("eps:0.125".parse::<LRule>().unwrap(), LRule::Epsilon(0.125));
        assert_eq!("sqrt-t".parse::<LRule>().unwrap(), LRule::SqrtT);
        assert!("fixed:x".parse::<LRule>().is_err());
        assert!("window".parse::<LRule>().is_err());
        assert_eq!(LRule::Epsilon(0.125).window(64, 0.0).unwrap(), 8);
        assert!(LRule::Epsilon(0.1).window(64, 0.0).is_err());
        assert_eq!(LRule::SqrtT.window(64, 0.01).unwrap(), 6);
        assert!(LRule::Fixed(0).window(64, 0.0).is_err());
    }

    #[test]
    fn component_from_label() {
        assert_eq!(label_component("bg[cos1,k=1,l=4,grad]"), 1);
        assert_eq!(label_component("quadratic[cos1,i=2,j=2,l=4,bf]"), 2);
        assert_eq!(label_component("crossed-bg[cos1,k=0,kbar=1,l=4,grad]"), 0);
    }
}
