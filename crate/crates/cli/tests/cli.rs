use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fourier-lab"));
    c.env_remove("FOURIER_LAB_WORKERS");
    c
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg("run")
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn flat_rs_default_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"experiment": "flat-rs"}"#);
    let out = dir.path().join("out");
    let o = run(&cfg, &out, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out.join("flat-rs.csv"));
    assert_eq!(rows.len(), 11);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[0].parse::<usize>().unwrap(), (1 << k) - 1);
        assert_eq!(row[1], "rudin_shapiro");
        let upper: f64 = row[4].parse().unwrap();
        assert!(upper <= std::f64::consts::SQRT_2 + 1e-6);
        assert_eq!(row[5].len(), 1 << k);
    }
    let header = fs::read_to_string(out.join("flat-rs.csv")).unwrap();
    assert!(header.starts_with("N,method,seed,ratio_lower,ratio_upper,signs\n"));
}

#[test]
fn bound_thm59_default_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"experiment": "bound-thm59"}"#);
    let out = dir.path().join("out");
    let o = run(&cfg, &out, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out.join("bound-thm59.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "1");
    assert_eq!(rows[0][7], "true");
    assert!(rows[0][4].parse::<f64>().unwrap() >= 0.21);
}

#[test]
fn manifest_hashes_match_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"experiment": "kernel-dump", "parameters": {"n": 4}}"#);
    let out = dir.path().join("out");
    let o = run(&cfg, &out, &["--seed", "99"]);
    assert_eq!(code(&o), 0);
    let m: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["experiment"], "kernel-dump");
    assert_eq!(m["seed"], 99);
    assert_eq!(m["summary"]["pass"], true);
    let outputs = m["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 3);
    for f in outputs {
        let bytes = fs::read(out.join(f["path"].as_str().unwrap())).unwrap();
        let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(f["sha256"].as_str().unwrap(), digest);
        assert_eq!(f["bytes"].as_u64().unwrap(), bytes.len() as u64);
    }
    assert!(!out.join("kernel-dump.csv.tmp").exists());
}

#[test]
fn config_hash_ignores_workers_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"experiment": "probe-sot", "seed": 3}"#);
    let hash = |out: &str, workers: &str| {
        let out = dir.path().join(out);
        assert_eq!(code(&run(&cfg, &out, &["--workers", workers])), 0);
        let m: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
        m["config_hash"].as_str().unwrap().to_string()
    };
    assert_eq!(hash("a", "1"), hash("b", "3"));
    let other = write_config(&dir, "d.json", r#"{"experiment": "probe-sot", "seed": 4}"#);
    let out = dir.path().join("c");
    assert_eq!(code(&run(&other, &out, &[])), 0);
    let m: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_ne!(m["config_hash"].as_str().unwrap(), hash("e", "1"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    for body in [
        "{not json",
        r#"{"experiment": "no-such-thing"}"#,
        r#"{"experiment": "flat-rs", "parameters": {"k_max": 3, "bogus": 1}}"#,
        r#"{"experiment": "flat-rs", "extra": true}"#,
        r#"{"experiment": "flat-exhaustive", "parameters": {"n_min": 5, "n_max": 2}}"#,
    ] {
        let cfg = write_config(&dir, "c.json", body);
        let o = run(&cfg, &out, &[]);
        assert_eq!(code(&o), 2, "{body}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = run(&dir.path().join("missing.json"), &out, &[]);
    assert_eq!(code(&o), 2);
}

#[test]
fn numeric_guards_exit_3_with_hint() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(&dir, "c.json", r#"{"experiment": "flat-exhaustive", "parameters": {"n_min": 25, "n_max": 25}}"#);
    let o = run(&cfg, &out, &[]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("hint: use the flat-anneal"));
    let cfg = write_config(&dir, "d.json", r#"{"experiment": "kernel-dump", "parameters": {"n": 8, "points": 4}}"#);
    assert_eq!(code(&run(&cfg, &out, &[])), 3);
}

#[test]
fn failed_checks_exit_4_after_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    // too coarse a grid to certify the √2 ceiling
    let cfg = write_config(&dir, "c.json", r#"{"experiment": "flat-rs", "parameters": {"k_max": 4, "oversampling": 8}}"#);
    let o = run(&cfg, &out, &[]);
    assert_eq!(code(&o), 4);
    let m: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["summary"]["pass"], false);
    assert!(!m["summary"]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn unwritable_output_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"experiment": "kernel-dump"}"#);
    assert_eq!(code(&run(&cfg, &blocker.join("out"), &[])), 1);
}

#[test]
fn workers_env_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"experiment": "kernel-dump"}"#);
    let out = dir.path().join("out");
    let o = bin()
        .env("FOURIER_LAB_WORKERS", "3")
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let m: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["workers"], 3);
}

fn plot(csv: &Path, x: &str, y: &str, out: &Path) -> Output {
    bin()
        .arg("plot")
        .arg("--csv")
        .arg(csv)
        .args(["--x", x, "--y", y, "--out"])
        .arg(out)
        .output()
        .unwrap()
}

#[test]
fn plot_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    fs::write(&data, "N,value\n0,1.5\n1,2\n2,2.25\n").unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    assert_eq!(code(&plot(&data, "N", "value", &a)), 0);
    assert_eq!(code(&plot(&data, "N", "value", &b)), 0);
    let svg = fs::read(&a).unwrap();
    assert_eq!(svg, fs::read(&b).unwrap());
    assert!(String::from_utf8(svg).unwrap().starts_with("<svg"));

    let empty = dir.path().join("e.csv");
    fs::write(&empty, "").unwrap();
    assert_eq!(code(&plot(&empty, "N", "value", &dir.path().join("e.svg"))), 0);
    assert!(dir.path().join("e.svg").exists());

    assert_eq!(code(&plot(&data, "N", "missing", &dir.path().join("m.svg"))), 2);
    assert_eq!(code(&plot(&dir.path().join("none.csv"), "N", "value", &dir.path().join("n.svg"))), 2);
}
