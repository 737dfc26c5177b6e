use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};

use ssburgers::dynamics::{sample_stationary, simulate};
use ssburgers::fields::{field_series, write_csv, FieldRecord};
use ssburgers::seeding::derive_seed;
use ssburgers::stats::{map_indices, Execution};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| CliError::io(path, e))?))
}

fn write_json(path: &Path, v: &Value) -> CliResult<()> {
    std::fs::write(path, serde_json::to_string_pretty(v)?).map_err(|e| CliError::io(path, e))
}

pub fn stem(i: usize) -> String {
    format!("traj_{i:05}")
}

/// Runs `ensemble_size` trajectories from the invariant measure and writes,
/// per trajectory, `<stem>.bin` + `<stem>.json` and `<stem>_summary.csv`, plus
/// one `fields.csv` and a `simulate.json` manifest.
pub fn run(config: &ExperimentConfig) -> CliResult<Value> {
    config.validate()?;
    let dir = config.output_dir();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let params = config.params(config.n)?;
    let phis = config.test_functions()?;
    let cfg = config.to_value();
    let n_steps = config.n_steps();
    let k_count = params.components();

    let results = map_indices(
        config.ensemble_size,
        Execution::default(),
        |i| -> CliResult<Vec<FieldRecord>> {
            let seed = derive_seed(config.base_seed, i as u64);
            let initial = sample_stationary(k_count, config.n, seed)?;
            let traj = simulate(&initial, &params, config.dt, n_steps, config.stride, seed).map_err(|e| {
                ssburgers::Error::Trajectory {
                    index: i,
                    source: Box::new(e),
                }
            })?;
            traj.save(&dir, &stem(i))?;
            let mut sidecar = traj.sidecar();
            sidecar["config"] = cfg.clone();
            sidecar["index"] = json!(i);
            write_json(&dir.join(format!("{}.json", stem(i))), &sidecar)?;
            let path = dir.join(format!("{}_summary.csv", stem(i)));
            let mut w = create(&path)?;
            writeln!(w, "# config {cfg}").map_err(|e| CliError::io(&path, e))?;
            traj.summary_csv(&mut w)?;
            w.flush().map_err(|e| CliError::io(&path, e))?;
            let mut records = Vec::new();
            for phi in &phis {
                for k in 0..k_count {
                    records.extend(field_series(&traj, phi, k)?.records(k_count, 0.0));
                }
            }
            Ok(records)
        },
    );
    let mut records = Vec::new();
    for r in results {
        records.extend(r?);
    }
    let path = dir.join("fields.csv");
    let mut w = create(&path)?;
    write_csv(&records, &mut w)?;
    writeln!(w, "# config {cfg}").map_err(|e| CliError::io(&path, e))?;
    w.flush().map_err(|e| CliError::io(&path, e))?;

    let manifest = json!({
        "command": "simulate",
        "config": cfg,
        "n_steps": n_steps,
        "trajectories": (0..config.ensemble_size)
            .map(|i| json!({"stem": stem(i), "seed": derive_seed(config.base_seed, i as u64)}))
            .collect::<Vec<_>>(),
        "fields": "fields.csv",
    });
    write_json(&dir.join("simulate.json"), &manifest)?;
    Ok(manifest)
}
