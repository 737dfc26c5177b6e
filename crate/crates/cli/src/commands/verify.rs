use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use ssburgers::coefficients::{check_model_constraints, gamma_to_model, model_to_gamma};
use ssburgers::rational::{format_rational, ratio};
use ssburgers::stats::{Verdict, VerdictDocument};
use ssburgers::symbolic::{gaussian_expectation, Generator, GeneratorParams, LatticePolynomial, Monomial};
use ssburgers::Rational;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult, Outcome};

pub const MAX_K: usize = 4;
pub const MAX_M: usize = 8;

pub struct VerifyOptions {
    pub degree: u32,
    pub adjoint_pairs: usize,
}

fn zero() -> Rational {
    Rational::default()
}

fn residual_text(r: &Rational) -> String {
    if *r == zero() {
        "0 (exact)".into()
    } else {
        format_rational(r)
    }
}

fn verdict(id: &str, name: &str, passed: bool, summary: String, details: Value) -> Verdict {
    Verdict {
        id: id.into(),
        name: name.into(),
        passed,
        summary,
        details,
        seconds: 0.0,
    }
}

/// All monomials of total degree `1..=degree` in `vars` variables.
pub fn monomials(vars: u32, degree: u32) -> Vec<Monomial> {
    fn rec(start: u32, vars: u32, left: u32, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Monomial>) {
        if !cur.is_empty() {
            out.push(Monomial::from_powers(cur.iter().copied()));
        }
        if left == 0 {
            return;
        }
        for v in start..vars {
            match cur.last_mut() {
                Some((last, e)) if *last == v => *e += 1,
                _ => cur.push((v, 1)),
            }
            rec(v, vars, left - 1, cur, out);
            match cur.last_mut() {
                Some((_, e)) if *e > 1 => *e -= 1,
                _ => {
                    cur.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(0, vars, degree, &mut Vec::new(), &mut out);
    out
}

fn random_poly(rng: &mut ChaCha8Rng, k: usize, m: usize) -> LatticePolynomial {
    let vars = (k * m) as u32;
    let mut f = LatticePolynomial::zero(k, m);
    for _ in 0..rng.random_range(1..=5) {
        let d = rng.random_range(0..=2u32);
        let mono = Monomial::from_powers((0..d).map(|_| (rng.random_range(0..vars), 1)));
        f.add_term(mono, ratio(rng.random_range(-9..=9), rng.random_range(1..=7)));
    }
    f
}

pub fn run(config: &ExperimentConfig, opts: &VerifyOptions) -> CliResult<(Outcome, Value, String)> {
    let model = config.exact_model()?;
    let k = model.components();
    let m = config.verify_m;
    if k > MAX_K || m > MAX_M || m == 0 {
        return Err(CliError::CostGuard(format!(
            "exact checks need K <= {MAX_K} and 1 <= M <= {MAX_M}, got K = {k}, M = {m}"
        )));
    }
    let eps = config.epsilon.exact()?;
    let mut doc = VerdictDocument::new(json!({"K": k, "M": m, "epsilon": format_rational(&eps)}));

    let report = check_model_constraints(&model, &zero());
    if let Some(first) = report.violations.first() {
        doc.push(verdict(
            "constraints",
            "coefficient constraints",
            false,
            format!(
                "violated: {} (residual {})",
                first.condition,
                format_rational(&first.residual)
            ),
            json!(report
                .violations
                .iter()
                .map(|v| json!({"condition": v.condition.to_string(), "residual": format_rational(&v.residual)}))
                .collect::<Vec<_>>()),
        ));
        let text = doc.table();
        return Ok((Outcome::Fail, doc.to_json(), text));
    }
    doc.push(verdict(
        "constraints",
        "coefficient constraints",
        true,
        "all hold".into(),
        Value::Null,
    ));

    let gamma = model_to_gamma(&model, &zero())?;
    let back = gamma_to_model(&gamma, &zero())?;
    let round_trip = back == model && model_to_gamma(&back, &zero())? == gamma;
    doc.push(verdict(
        "trilinear",
        "trilinear round trip",
        round_trip,
        if round_trip {
            "0 (exact)".into()
        } else {
            "mismatch".into()
        },
        Value::Null,
    ));

    let params = GeneratorParams::exact(model, eps, m)?;
    let gen = Generator::new(&params);
    let div = gen.divergence_identity();
    doc.push(verdict(
        "divergence",
        "divergence identity",
        div.is_zero(),
        if div.is_zero() {
            "0 (exact)".into()
        } else {
            format!("{} nonzero terms", div.len())
        },
        Value::Null,
    ));

    // the generator is affine in ε, so checking ε and 0 covers the whole line
    let symmetric = params.with_epsilon(zero());
    let mut gens = vec![gen];
    if *params.epsilon() != zero() {
        gens.push(Generator::new(&symmetric));
    }

    let monos = monomials((k * m) as u32, opts.degree);
    let mut worst: Option<(String, Rational)> = None;
    for gen in &gens {
        for mono in &monos {
            let f = LatticePolynomial::monomial(k, m, mono.clone(), ratio(1, 1));
            let r = gen.stationarity_residual(&f)?;
            if r != zero() && worst.is_none() {
                worst = Some((format!("{:?}", mono.powers()), r));
            }
        }
    }
    doc.push(verdict(
        "stationarity",
        "stationarity residuals",
        worst.is_none(),
        match &worst {
            None => format!("0 (exact) for {} monomials of degree <= {}", monos.len(), opts.degree),
            Some((mono, r)) => format!("E[L u^{mono}] = {}", residual_text(r)),
        },
        json!({"monomials": monos.len(), "degree": opts.degree, "epsilons": gens.len()}),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(config.base_seed);
    let mut mismatches = 0usize;
    for _ in 0..opts.adjoint_pairs {
        let f = random_poly(&mut rng, k, m);
        let g = random_poly(&mut rng, k, m);
        for gen in &gens {
            let lhs = gaussian_expectation(&(&gen.apply(&f) * &g))?;
            let rhs = gaussian_expectation(&(&f * &gen.apply_adjoint(&g)))?;
            if lhs != rhs {
                mismatches += 1;
                break;
            }
        }
    }
    doc.push(verdict(
        "adjoint",
        "adjoint identity",
        mismatches == 0,
        if mismatches == 0 {
            format!("0 (exact) on {} random pairs", opts.adjoint_pairs)
        } else {
            format!("{mismatches} of {} pairs differ", opts.adjoint_pairs)
        },
        json!({"pairs": opts.adjoint_pairs, "seed": config.base_seed}),
    ));

    let text = doc.table();
    Ok((Outcome::from_passed(doc.passed()), doc.to_json(), text))
}
