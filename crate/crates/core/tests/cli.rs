use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use spinchain_vqe::cli::RunManifest;

fn spinvqe(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinvqe"))
        .args(args)
        .current_dir(cwd)
        .env_remove("SPINVQE_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn sweep_writes_verifiable_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let o = spinvqe(
        &["sweep", "--ansatz", "hea", "--grid", "0:2pi:21", "--shots", "800", "--seed", "3", "--out", "run", "--dump-circuit"],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = tmp.path().join("run");
    for f in ["results.json", "landscape.csv", "circuit.json", "config.json", "manifest.json"] {
        assert!(dir.join(f).is_file(), "missing {f}");
    }
    let m = RunManifest::load(&dir).unwrap();
    assert_eq!(m.master_seed, 3);
    m.verify(&dir).unwrap();

    let landscape = fs::read_to_string(dir.join("landscape.csv")).unwrap();
    assert_eq!(landscape.lines().next(), Some("theta,energy,sigma"));
    assert_eq!(landscape.lines().count(), 22);

    let config = fs::read_to_string(dir.join("config.json")).unwrap();
    fs::write(dir.join("config.json"), config.replace("800", "801")).unwrap();
    assert!(m.verify(&dir).is_err());
}

#[test]
fn rerun_from_stored_config_is_bit_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let first = spinvqe(
        &["sweep", "--ansatz", "exchange", "--sites", "3", "--noise", "garnet", "--shots", "300", "--grid", "0:pi:9", "--out", "a"],
        tmp.path(),
    );
    assert!(first.status.success());
    let second = spinvqe(&["sweep", "--config", "a/config.json", "--out", "b"], tmp.path());
    assert!(second.status.success(), "{}", String::from_utf8_lossy(&second.stderr));
    let read = |d: &str| fs::read(tmp.path().join(d).join("results.json")).unwrap();
    assert_eq!(read("a"), read("b"));
    let hash = |d: &str| RunManifest::load(&tmp.path().join(d)).unwrap().config_hash;
    assert_eq!(hash("a"), hash("b"));
}

#[test]
fn toml_config_and_optimizer() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("exp.toml"),
        r#"
[chain]
sites = 2
coupling = 1.0

[ansatz]
family = "expressive"
sites = 2
layers = 3

[execution]
mode = "exact"

[sweep]
kind = "optimizer"
method = "coordinate_golden"
max_evals = 50000
tolerance = 1e-10
restarts = 2
seed = 5
"#,
    )
    .unwrap();
    let o = spinvqe(&["optimize", "--config", "exp.toml", "--out", "opt"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("exact E0     -3.000000"));
    let results: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("opt/results.json")).unwrap()).unwrap();
    let e = results[0]["points"].as_array().unwrap().last().unwrap()["estimate"]["energy"].as_f64().unwrap();
    assert!((e + 3.0).abs() < 1e-6);
}

#[test]
fn invalid_readout_probability_is_rejected_before_running() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("noise.json"),
        r#"{"readout_flip_prob": 1.3, "single_qubit_depol": 0.0, "two_qubit_depol": 0.0}"#,
    )
    .unwrap();
    let o = spinvqe(&["sweep", "--noise", "custom", "--noise-config", "noise.json", "--out", "x"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("readout_flip_prob"));
    assert!(!tmp.path().join("x").exists());

    let v = spinvqe(&["validate", "--quick", "--noise-config", "noise.json"], tmp.path());
    assert_eq!(v.status.code(), Some(1));
}

#[test]
fn validate_quick_passes_fast() {
    let tmp = tempfile::tempdir().unwrap();
    let start = std::time::Instant::now();
    let o = spinvqe(&["validate", "--quick"], tmp.path());
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(start.elapsed().as_secs_f64() < 10.0);
    assert!(stdout(&o).contains("0 failed"));
}

#[test]
fn reproduce_targets_use_separate_directories() {
    let tmp = tempfile::tempdir().unwrap();
    for target in ["table5", "fig3"] {
        let o = spinvqe(&["reproduce", target, "--out", "repro"], tmp.path());
        assert!(o.status.success(), "{target}: {}", stdout(&o));
        let dir = tmp.path().join("repro").join(target);
        RunManifest::load(&dir).unwrap().verify(&dir).unwrap();
    }
    let table = fs::read_to_string(tmp.path().join("repro/table5/table4.csv")).unwrap();
    assert!(table.contains("2,-3.0000000000,-3.0000000000,-1.0000000000,2.0000000000"));
    assert!(tmp.path().join("repro/fig3/landscape-exchange-n2-noisy.csv").is_file());
    assert!(!tmp.path().join("repro/table5/landscape-exchange-n2-noisy.csv").exists());
}

#[test]
fn output_root_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_spinvqe"))
        .args(["exact", "--sites", "3"])
        .env("SPINVQE_OUT", tmp.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("exact/exact.json")).unwrap()).unwrap();
    assert!((summary["ground_energy"].as_f64().unwrap() + 4.0).abs() < 1e-10);
}

#[test]
fn usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(spinvqe(&["reproduce", "fig9"], tmp.path()).status.code(), Some(2));
    assert_eq!(spinvqe(&["sweep", "--grid", "0:1:1"], tmp.path()).status.code(), Some(2));
    assert_eq!(spinvqe(&["sweep", "--ansatz", "hea", "--layers", "2"], tmp.path()).status.code(), Some(2));
}

#[test]
fn empty_report_keeps_headers() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("none.json"), "[]").unwrap();
    let o = spinvqe(&["report", "--inputs", "none.json", "--out", "rep"], tmp.path());
    assert!(o.status.success());
    let table = fs::read_to_string(tmp.path().join("rep/table4.csv")).unwrap();
    assert_eq!(table, "n,exact,expressive_min,exchange_min,gap\n");
}
