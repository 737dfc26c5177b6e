use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::symbolic::GeneratorParams;

use super::integrator::{check_dt, Integrator, Scheme};
use super::state::LatticeState;

pub const TRAJECTORY_MAGIC: [u8; 4] = *b"SSBT";
pub const TRAJECTORY_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub step: u64,
    pub state: LatticeState,
}

/// Snapshots of one seeded run. The noise is not stored; it is regenerated
/// from `(seed, step)` by [`super::step_noise`].
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub params: GeneratorParams<f64>,
    pub dt: f64,
    pub stride: u64,
    pub n_steps: u64,
    pub seed: u64,
    pub scheme: Scheme,
    pub snapshots: Vec<Snapshot>,
}

impl Trajectory {
    /// Microscopic time of snapshot `i`.
    pub fn time(&self, i: usize) -> f64 {
        self.snapshots[i].step as f64 * self.dt
    }

    /// Macroscopic snapshot times `step · dt / n²`.
    pub fn macroscopic_times(&self, n: usize) -> Vec<f64> {
        self.snapshots
            .iter()
            .map(|s| s.step as f64 * self.dt / (n * n) as f64)
            .collect()
    }

    pub fn final_state(&self) -> &LatticeState {
        &self
            .snapshots
            .last()
            .expect("trajectory has at least one snapshot")
            .state
    }

    pub fn sidecar(&self) -> Value {
        json!({
            "format": "ssburgers-trajectory",
            "version": TRAJECTORY_VERSION,
            "params": self.params.to_json(),
            "dt": self.dt,
            "stride": self.stride,
            "n_steps": self.n_steps,
            "seed": self.seed,
            "scheme": self.scheme.tag(),
            "snapshots": self.snapshots.len(),
        })
    }

    /// Binary layout, little endian: magic, version u32, K u32, M u32, dt
    /// f64, stride u64, seed u64, n_steps u64, snapshot count u64, then each
    /// snapshot as `K·M` row-major f64. Snapshot steps are implied by stride
    /// and `n_steps`.
    pub fn write_binary(&self, w: &mut impl Write) -> Result<()> {
        let (k, m) = (self.params.components() as u32, self.params.sites() as u32);
        w.write_all(&TRAJECTORY_MAGIC)?;
        w.write_all(&TRAJECTORY_VERSION.to_le_bytes())?;
        w.write_all(&k.to_le_bytes())?;
        w.write_all(&m.to_le_bytes())?;
        w.write_all(&self.dt.to_le_bytes())?;
        w.write_all(&self.stride.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&self.n_steps.to_le_bytes())?;
        w.write_all(&(self.snapshots.len() as u64).to_le_bytes())?;
        for s in &self.snapshots {
            for v in s.state.values() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Inverse of [`Trajectory::write_binary`]; the parameters come from the
    /// sidecar since the binary carries only the lattice shape.
    pub fn read_binary(r: &mut impl Read, params: GeneratorParams<f64>) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if magic != TRAJECTORY_MAGIC {
            return Err(Error::Format("not a trajectory file".into()));
        }
        let version = read_u32(r)?;
        if version != TRAJECTORY_VERSION {
            return Err(Error::Format(format!("unsupported trajectory version {version}")));
        }
        let (k, m) = (read_u32(r)? as usize, read_u32(r)? as usize);
        if k != params.components() || m != params.sites() {
            return Err(Error::Format(format!(
                "binary is {k}x{m}, sidecar is {}x{}",
                params.components(),
                params.sites()
            )));
        }
        let dt = f64::from_le_bytes(read_array(r)?);
        let stride = read_u64(r)?;
        let seed = read_u64(r)?;
        let n_steps = read_u64(r)?;
        let count = read_u64(r)? as usize;
        let steps = snapshot_steps(n_steps, stride);
        if steps.len() != count {
            return Err(Error::Format(format!(
                "header claims {count} snapshots, stride and step count imply {}",
                steps.len()
            )));
        }
        let mut snapshots = Vec::with_capacity(count);
        for step in steps {
            let mut values = Vec::with_capacity(k * m);
            for _ in 0..k * m {
                values.push(f64::from_le_bytes(read_array(r)?));
            }
            snapshots.push(Snapshot {
                step,
                state: LatticeState::from_values(k, m, values)?,
            });
        }
        Ok(Self {
            params,
            dt,
            stride,
            n_steps,
            seed,
            scheme: Scheme::EulerMaruyama,
            snapshots,
        })
    }

    /// Writes `<stem>.bin` and `<stem>.json`.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<()> {
        let mut w = BufWriter::new(File::create(dir.join(format!("{stem}.bin")))?);
        self.write_binary(&mut w)?;
        w.flush()?;
        std::fs::write(
            dir.join(format!("{stem}.json")),
            serde_json::to_string_pretty(&self.sidecar())?,
        )?;
        Ok(())
    }

    pub fn load(dir: &Path, stem: &str) -> Result<Self> {
        let sidecar: Value = serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{stem}.json")))?)?;
        let params = GeneratorParams::from_json(
            sidecar
                .get("params")
                .ok_or_else(|| Error::Format("sidecar without params".into()))?,
            &crate::coefficients::DEFAULT_TOLERANCE,
        )?;
        let mut r = BufReader::new(File::open(dir.join(format!("{stem}.bin")))?);
        let mut traj = Self::read_binary(&mut r, params)?;
        if let Some(tag) = sidecar.get("scheme").and_then(Value::as_str) {
            traj.scheme = Scheme::from_tag(tag)?;
        }
        Ok(traj)
    }

    /// Per-snapshot, per-component summary: `step,time,k,sum,mean,m2,m4`.
    pub fn summary_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "step,time,k,sum,mean,m2,m4")?;
        for s in &self.snapshots {
            let m = s.state.sites() as f64;
            for k in 0..s.state.components() {
                let row = s.state.row(k);
                let sum = s.state.component_sum(k);
                let m2 = super::neumaier_sum(row.iter().map(|v| v * v)) / m;
                let m4 = super::neumaier_sum(row.iter().map(|v| v.powi(4))) / m;
                writeln!(
                    w,
                    "{},{},{},{:e},{:e},{:e},{:e}",
                    s.step,
                    s.step as f64 * self.dt,
                    k,
                    sum,
                    sum / m,
                    m2,
                    m4
                )?;
            }
        }
        Ok(())
    }
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    Ok(u32::from_le_bytes(read_array(r)?))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    Ok(u64::from_le_bytes(read_array(r)?))
}

/// Steps at which [`simulate`] records a snapshot.
pub fn snapshot_steps(n_steps: u64, stride: u64) -> Vec<u64> {
    let mut steps: Vec<u64> = (0..=n_steps).step_by(stride.max(1) as usize).collect();
    if *steps.last().unwrap() != n_steps {
        steps.push(n_steps);
    }
    steps
}

/// Iterates Euler-Maruyama from `initial` with noise derived from `seed`,
/// keeping the state every `stride` steps plus the final one.
pub fn simulate(
    initial: &LatticeState,
    p: &GeneratorParams<f64>,
    dt: f64,
    n_steps: u64,
    stride: u64,
    seed: u64,
) -> Result<Trajectory> {
    check_dt(dt)?;
    let mut integrator = Integrator::new(p, dt)?;
    let mut state = initial.clone();
    let mut snapshots = Vec::new();
    integrator.run(&mut state, n_steps, stride, seed, |step, s| {
        snapshots.push(Snapshot { step, state: s.clone() })
    })?;
    Ok(Trajectory {
        params: p.clone(),
        dt,
        stride,
        n_steps,
        seed,
        scheme: Scheme::EulerMaruyama,
        snapshots,
    })
}
