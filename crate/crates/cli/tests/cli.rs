use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qelm-lab"));
    cmd.env_remove("QELM_LAB_SEED");
    cmd
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn bell_fixture_prints_equal_split() {
    let out = run(&["simulate", fixture("bell.circuit").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let dist: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(dist, serde_json::json!({"00": 0.5, "11": 0.5}));
}

#[test]
fn noisy_bell_leaks_into_odd_states() {
    let out = run(&["simulate", fixture("bell.circuit").to_str().unwrap(), "--profile", "device-b"]);
    assert_eq!(out.status.code(), Some(0));
    let dist: serde_json::Map<String, serde_json::Value> = serde_json::from_str(stdout(&out).trim()).unwrap();
    let odd = dist.get("01").and_then(|v| v.as_f64()).unwrap_or(0.0) + dist.get("10").and_then(|v| v.as_f64()).unwrap_or(0.0);
    assert!(odd > 0.0);
}

#[test]
fn shots_give_integer_counts() {
    let out = run(&["simulate", fixture("bell.circuit").to_str().unwrap(), "--shots", "1000", "--seed", "3"]);
    let counts: std::collections::BTreeMap<String, u64> = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(counts.values().sum::<u64>(), 1000);
    assert_eq!(stdout(&run(&["simulate", fixture("bell.circuit").to_str().unwrap(), "--shots", "1000", "--seed", "3"])), stdout(&out));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    for sub in ["simulate", "train", "scenario", "uq", "calibrate-zne", "report"] {
        assert_eq!(run(&[sub, "--help"]).status.code(), Some(0), "{sub} --help");
    }
    // a missing profile for a noisy scenario is a usage error naming the field
    let out = run(&["scenario", "--print-config"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("profile"));
    let out = run(&["simulate", "/definitely/not/here.circuit"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_circuit_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.circuit");
    std::fs::write(&path, "qubits 2\nfoo 0\n").unwrap();
    let out = run(&["simulate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn dump_circuit_round_trips() {
    let out = run(&["simulate", fixture("bell.circuit").to_str().unwrap(), "--dump-circuit"]);
    assert_eq!(stdout(&out), "qubits 2\nH 0\nCX 0 1\n");
}

#[test]
fn printed_config_is_a_valid_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture("c1_1-zero-noise.json");
    let first = stdout(&run(&["scenario", "--config", config.to_str().unwrap(), "--print-config"]));
    let resolved = dir.path().join("resolved.json");
    std::fs::write(&resolved, &first).unwrap();
    let second = stdout(&run(&["scenario", "--config", resolved.to_str().unwrap(), "--print-config"]));
    assert_eq!(first, second);
    let value: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(value["scenario"], "C1_1");
    assert_eq!(value["shots"], 0);
}

#[test]
fn flags_override_file_and_env() {
    let config = fixture("c1_1-zero-noise.json");
    let seed_of = |extra: &[&str], env: Option<&str>| {
        let mut cmd = bin();
        cmd.args(["scenario", "--config", config.to_str().unwrap(), "--print-config"]).args(extra);
        if let Some(v) = env {
            cmd.env("QELM_LAB_SEED", v);
        }
        let v: serde_json::Value = serde_json::from_slice(&cmd.output().unwrap().stdout).unwrap();
        v["seed"].as_u64().unwrap()
    };
    assert_eq!(seed_of(&[], None), 1);
    assert_eq!(seed_of(&[], Some("99")), 1);
    assert_eq!(seed_of(&["--seed", "5"], Some("99")), 5);
}

#[test]
fn zero_noise_scenario_is_unchanged_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture("c1_1-zero-noise.json");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["scenario", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let results = std::fs::read_to_string(a.join("results.json")).unwrap();
    assert_eq!(results, std::fs::read_to_string(b.join("results.json")).unwrap());
    let report: serde_json::Value = serde_json::from_str(&results).unwrap();
    for r in report["repeats"].as_array().unwrap() {
        assert!(r["percent_change"].as_f64().unwrap().abs() < 1e-9);
    }
    for name in ["metrics.csv", "boxplot.svg", "config.json"] {
        assert!(a.join(name).is_file(), "{name}");
    }

    // `report` re-emits identical files from results.json alone
    let c = dir.path().join("c");
    std::fs::create_dir_all(&c).unwrap();
    std::fs::copy(a.join("results.json"), c.join("results.json")).unwrap();
    let o = run(&["report", "--results", c.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["metrics.csv", "boxplot.svg"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(c.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn ideal_training_writes_model_and_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "train",
        "--config",
        fixture("c1_1-zero-noise.json").to_str().unwrap(),
        "--ideal",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let eval: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("evaluation.json")).unwrap()).unwrap();
    assert_eq!(eval["metric"], "mse");
    assert!(eval["value"].as_f64().unwrap().is_finite());
    assert!(dir.path().join("model.json").is_file());
}

#[test]
fn uq_on_a_noiseless_backend_matches_ideal() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "uq",
        "--config",
        fixture("c1_1-zero-noise.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let uq: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("uq.json")).unwrap()).unwrap();
    assert_eq!(uq["settings"]["method"], "bootstrap");
    assert_eq!(uq["scenario"], uq["ideal"]);
}

#[test]
fn calibration_picks_a_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "calibrate-zne",
        "--profile",
        "device-c",
        "--circuit",
        fixture("bell.circuit").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let zne: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("zne.json")).unwrap()).unwrap();
    assert!(zne.is_object());
}
