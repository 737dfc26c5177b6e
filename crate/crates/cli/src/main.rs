//! `ssburgers`: exact verification, simulation and scaling scans for coupled
//! Sasamoto-Spohn lattice models.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 configuration or
//! cost-guard error, 3 numerical instability during a run.

mod commands;
mod config;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use commands::convert::Target;
use commands::scan::{LRule, Quantity, ScanOptions};
use commands::verify::VerifyOptions;
use config::{ExperimentConfig, Overrides};
use error::{CliError, CliResult, Outcome};

#[derive(Parser)]
#[command(
    name = "ssburgers",
    version,
    about = "Coupled Sasamoto-Spohn simulator and exact verifier"
)]
struct Cli {
    /// Worker threads for ensembles (default: all cores).
    #[arg(long, global = true, env = "SSBURGERS_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON). Any output document of this tool also works.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    stride: Option<u64>,
    #[arg(long)]
    ensemble_size: Option<usize>,
    #[arg(long)]
    base_seed: Option<u64>,
    /// Output directory (else config, then $SSBURGERS_OUT_DIR, then ./ssburgers-out).
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl Common {
    fn load(&self, verify_m: Option<usize>) -> CliResult<ExperimentConfig> {
        let o = Overrides {
            n: self.n,
            horizon: self.horizon,
            dt: self.dt,
            stride: self.stride,
            ensemble_size: self.ensemble_size,
            base_seed: self.base_seed,
            output_dir: self.output_dir.clone(),
            verify_m,
        };
        Ok(ExperimentConfig::load(&self.config)?.apply(&o).resolve())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact checks of the coefficient constraints and generator identities.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Lattice size for the exact checks.
        #[arg(long)]
        m: Option<usize>,
        /// Maximal monomial degree for the stationarity residuals.
        #[arg(long, default_value_t = 4)]
        degree: u32,
        /// Random polynomial pairs for the adjoint identity.
        #[arg(long, default_value_t = 20)]
        adjoint_pairs: usize,
    },
    /// Converts a coefficients document between its two forms.
    Convert {
        input: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        /// Write here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Runs an ensemble and writes trajectories and fluctuation fields.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Measures a quantity over several lattice sizes and fits its scaling.
    Scan {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// Comma-separated lattice sizes, at least three.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        /// Window rule: fixed:<l>, eps:<ε> or sqrt-t.
        #[arg(long, default_value = "fixed:4")]
        l_rule: LRule,
        /// Expected slope (or ratio for qv).
        #[arg(long)]
        expected: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Summarizes the verdicts in a directory of outputs (or one file).
    Report { path: PathBuf },
}

fn write_json(path: &Path, v: &Value) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, serde_json::to_string_pretty(v)? + "\n").map_err(|e| CliError::io(path, e))
}

fn run(cli: Cli) -> CliResult<Outcome> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        ssburgers::stats::configure_threads(t)?;
    }
    match cli.command {
        Command::Verify {
            common,
            m,
            degree,
            adjoint_pairs,
        } => {
            let cfg = common.load(m)?;
            let (outcome, mut doc, text) = commands::verify::run(&cfg, &VerifyOptions { degree, adjoint_pairs })?;
            doc["config"] = cfg.to_value();
            doc["command"] = "verify".into();
            write_json(&cfg.output_dir().join("verify.json"), &doc)?;
            print!("{text}");
            Ok(outcome)
        }
        Command::Convert { input, to, output } => {
            let text = std::fs::read_to_string(&input).map_err(|e| CliError::io(&input, e))?;
            let v: Value =
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", input.display())))?;
            let out = commands::convert::run(v.get("model").unwrap_or(&v), to)?;
            match output {
                Some(p) => write_json(&p, &out)?,
                None => println!("{}", serde_json::to_string_pretty(&out)?),
            }
            Ok(Outcome::Pass)
        }
        Command::Simulate { common } => {
            let cfg = common.load(None)?;
            let manifest = commands::simulate::run(&cfg)?;
            println!(
                "{} trajectories of {} steps written to {}",
                cfg.ensemble_size,
                manifest["n_steps"],
                cfg.output_dir().display()
            );
            Ok(Outcome::Pass)
        }
        Command::Scan {
            common,
            quantity,
            n_list,
            l_rule,
            expected,
            tolerance,
        } => {
            let cfg = common.load(None)?;
            let opts = ScanOptions {
                quantity,
                n_list,
                l_rule,
                expected,
                tolerance,
            };
            let (outcome, _, text) = commands::scan::run(&cfg, &opts)?;
            print!("{text}");
            Ok(outcome)
        }
        Command::Report { path } => {
            let (outcome, _, text) = commands::report::run(&path)?;
            print!("{text}");
            Ok(outcome)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
