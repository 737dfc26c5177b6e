use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ssburgers"));
    c.env_remove("SSBURGERS_OUT_DIR").env_remove("SSBURGERS_THREADS");
    c
}

fn model() -> Value {
    json!({"K": 2, "alpha": [1, 1], "beta": {"0,1": 1, "1,1": 1}, "gamma": {"0,1": "1/2", "1,1": "1/2"}})
}

fn write_config(dir: &Path, name: &str, patch: Value) -> std::path::PathBuf {
    let mut cfg = json!({"model": model(), "n": 16, "horizon": 0.005, "ensemble_size": 3, "base_seed": 11});
    for (k, v) in patch.as_object().unwrap() {
        cfg[k] = v.clone();
    }
    let path = dir.join(name);
    std::fs::write(&path, cfg.to_string()).unwrap();
    path
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = cmd.output().unwrap();
    (
        status.code().unwrap(),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_admissible_model_passes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", json!({}));
    let (code, out, _) = run(bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .args(["--m", "3", "--degree", "2"])
        .arg("--output-dir")
        .arg(tmp.path()));
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("5 of 5 passed"));
    let doc = read_json(&tmp.path().join("verify.json"));
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["config"]["n"], 16);
}

#[test]
fn verify_violating_model_fails_with_the_condition() {
    let tmp = TempDir::new().unwrap();
    let mut m = model();
    m["beta"] = json!({"0,1": 1});
    let cfg = write_config(tmp.path(), "c.json", json!({"model": m}));
    let (code, out, err) = run(bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--output-dir")
        .arg(tmp.path()));
    assert_eq!(code, 1, "{out}{err}");
    assert!(out.contains("violated"), "{out}");
}

#[test]
fn cost_guard_is_a_distinct_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", json!({}));
    let (code, _, err) = run(bin()
        .args(["verify", "--m", "9", "--config"])
        .arg(&cfg)
        .arg("--output-dir")
        .arg(tmp.path()));
    assert_eq!(code, 2);
    assert!(err.contains("cost guard"), "{err}");
}

#[test]
fn bad_configs_exit_two() {
    let tmp = TempDir::new().unwrap();
    for (name, patch) in [
        ("dt.json", json!({"dt": 0.5})),
        ("unknown.json", json!({"colour": "red"})),
        ("phi.json", json!({"test_functions": ["tan3"]})),
    ] {
        let cfg = write_config(tmp.path(), name, patch);
        let (code, _, err) = run(bin()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .arg("--output-dir")
            .arg(tmp.path()));
        assert_eq!(code, 2, "{name}: {err}");
        assert!(err.contains("error"), "{err}");
    }
    let (code, ..) = run(bin().args(["simulate", "--config", "/nonexistent/c.json"]));
    assert_eq!(code, 2);
    let (code, ..) = run(bin()
        .args(["scan", "--quantity", "bg", "--n-list", "16,32", "--config"])
        .arg(write_config(tmp.path(), "ok.json", json!({}))));
    assert_eq!(code, 2);
}

#[test]
fn unstable_run_exits_three() {
    let tmp = TempDir::new().unwrap();
    let big = json!({"K": 2, "alpha": [1, 1], "beta": {"0,1": 1e6, "1,1": 1e6}, "gamma": {"0,1": 5e5, "1,1": 5e5}});
    let cfg = write_config(
        tmp.path(),
        "c.json",
        json!({"model": big, "epsilon": 1.0, "dt": 0.25, "horizon": 1.0}),
    );
    let (code, _, err) = run(bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--output-dir")
        .arg(tmp.path()));
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("instability"), "{err}");
}

#[test]
fn simulate_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", json!({"test_functions": ["cos1", "sin2"]}));
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for (dir, threads) in [(&a, "1"), (&b, "2")] {
        let (code, _, err) = run(bin()
            .args(["--threads", threads, "simulate", "--config"])
            .arg(&cfg)
            .arg("--output-dir")
            .arg(dir));
        assert_eq!(code, 0, "{err}");
    }
    for f in ["traj_00000.bin", "traj_00002.bin"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    // text outputs embed the config, which names the output directory
    let (sa, sb) = (a.display().to_string(), b.display().to_string());
    for f in [
        "fields.csv",
        "traj_00002_summary.csv",
        "traj_00001.json",
        "simulate.json",
    ] {
        let ta = std::fs::read_to_string(a.join(f)).unwrap();
        let tb = std::fs::read_to_string(b.join(f)).unwrap().replace(&sb, &sa);
        assert_eq!(ta, tb, "{f}");
    }
    let manifest = read_json(&a.join("simulate.json"));
    assert_eq!(manifest["n_steps"], 128);
    assert_eq!(manifest["trajectories"].as_array().unwrap().len(), 3);
    let fields = std::fs::read_to_string(a.join("fields.csv")).unwrap();
    assert!(fields.lines().last().unwrap().starts_with("# config "));

    // the manifest is itself a valid config
    let c = tmp.path().join("c2");
    let (code, ..) = run(bin()
        .args(["simulate", "--config"])
        .arg(a.join("simulate.json"))
        .arg("--output-dir")
        .arg(&c));
    assert_eq!(code, 0);
    assert_eq!(
        std::fs::read(a.join("traj_00001.bin")).unwrap(),
        std::fs::read(c.join("traj_00001.bin")).unwrap()
    );
}

#[test]
fn zero_horizon_writes_initial_states() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", json!({"horizon": 0.0}));
    let (code, _, err) = run(bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--output-dir")
        .arg(tmp.path()));
    assert_eq!(code, 0, "{err}");
    assert_eq!(read_json(&tmp.path().join("simulate.json"))["n_steps"], 0);
    assert!(tmp.path().join("traj_00002.bin").exists());
}

#[test]
fn scan_with_unit_window_is_identically_zero() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", json!({}));
    let (code, out, err) = run(bin()
        .args([
            "scan",
            "--quantity",
            "bg",
            "--n-list",
            "8,16,32",
            "--l-rule",
            "fixed:1",
            "--config",
        ])
        .arg(&cfg)
        .arg("--output-dir")
        .arg(tmp.path()));
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("identically zero"), "{out}");
    let doc = read_json(&tmp.path().join("scan_bg.json"));
    assert_eq!(doc["fit"], Value::Null);
    assert!(tmp.path().join("scan_bg.csv").exists());
}

#[test]
fn scan_reruns_from_embedded_config() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", json!({}));
    let args = [
        "scan",
        "--quantity",
        "crossed-bg",
        "--n-list",
        "8,16,32",
        "--l-rule",
        "fixed:2",
    ];
    let (code, ..) = run(bin()
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--output-dir")
        .arg(tmp.path().join("a")));
    assert!(code == 0 || code == 1);
    let first = read_json(&tmp.path().join("a/scan_crossed-bg.json"));
    let (code2, ..) = run(bin()
        .args(args)
        .arg("--config")
        .arg(tmp.path().join("a/scan_crossed-bg.json"))
        .arg("--output-dir")
        .arg(tmp.path().join("b")));
    assert_eq!(code, code2);
    let mut second = read_json(&tmp.path().join("b/scan_crossed-bg.json"));
    second["config"]["output_dir"] = first["config"]["output_dir"].clone();
    assert_eq!(first, second);
}

#[test]
fn convert_round_trip() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("m.json");
    std::fs::write(&input, model().to_string()).unwrap();
    let gamma = tmp.path().join("g.json");
    let (code, ..) = run(bin()
        .arg("convert")
        .arg(&input)
        .args(["--to", "gamma", "--output"])
        .arg(&gamma));
    assert_eq!(code, 0);
    assert!(read_json(&gamma).get("gamma_tensor").is_some());
    let (code, out, _) = run(bin().arg("convert").arg(&gamma).args(["--to", "coefficients"]));
    assert_eq!(code, 0);
    let back: Value = serde_json::from_str(&out).unwrap();
    let (code, again, _) = run(bin().arg("convert").arg(&input).args(["--to", "coefficients"]));
    assert_eq!(code, 0);
    assert_eq!(back, serde_json::from_str::<Value>(&again).unwrap());
}

#[test]
fn report_exit_status_follows_verdicts() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(
        tmp.path().join("a.json"),
        r#"{"verdicts":[{"id":"x","passed":true,"summary":"fine"}]}"#,
    )
    .unwrap();
    let (code, out, _) = run(bin().arg("report").arg(tmp.path()));
    assert_eq!(code, 0);
    assert!(out.contains("1 of 1 passed"));
    std::fs::write(
        tmp.path().join("b.json"),
        r#"{"verdicts":[{"id":"y","passed":false,"summary":"off"}]}"#,
    )
    .unwrap();
    assert_eq!(run(bin().arg("report").arg(tmp.path())).0, 1);
}
