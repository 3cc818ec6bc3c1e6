use std::path::Path;
use std::process::{Command, Output};

fn twinkernel(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twinkernel"))
        .current_dir(dir)
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn assert_header(text: &str) {
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# twinkernel 0.1.0 config_sha256="), "{first}");
    let hash = first.split("config_sha256=").nth(1).unwrap().split(' ').next().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(first.contains(" seed="));
}

#[test]
fn estimate_series_on_three_zeros() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "data.txt", "0\n0\n\n0\n");
    let out = twinkernel(dir.path(), &["estimate", "--data", "data.txt", "--method", "series", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "estimate.json")).unwrap();
    let c = &json["report"]["fit"]["coefficients"];
    assert_eq!(c[0].as_f64().unwrap(), 1.0);
    assert!(c[1].as_f64().unwrap().abs() <= 1e-15);
    assert!((c[2].as_f64().unwrap() + std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-15);
    assert_eq!(json["header"]["tool"], "twinkernel");
    assert_header(&read(dir.path(), "estimate.csv"));
}

#[test]
fn estimate_parzen_single_point() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "data.txt", "0\n");
    write(dir.path(), "cfg.json", r#"{"estimate": {"method": "parzen", "h": 1.0, "grid": {"lo": 0.0, "hi": 0.0, "points": 1}}}"#);
    let out = twinkernel(dir.path(), &["--config", "cfg.json", "estimate", "--data", "data.txt"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "estimate.csv");
    assert_eq!(csv.lines().nth(2).unwrap(), "0.0000000000000000e0,3.9894228040143270e-1");
}

#[test]
fn bad_inputs_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "outside.txt", "0.5\n1.5\n");
    write(dir.path(), "leg.json", r#"{"estimate": {"method": "series", "basis": "LegendreUniform"}}"#);
    let out = twinkernel(dir.path(), &["--config", "leg.json", "estimate", "--data", "outside.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1.5"));

    write(dir.path(), "garbage.txt", "0.1\nabc\n");
    let out = twinkernel(dir.path(), &["estimate", "--data", "garbage.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    write(dir.path(), "unknown.json", r#"{"verify": {"basis": "HermiteProbabilist", "profile": {"kind": "Geometric", "rho": 0.5}, "bogus": 1}}"#);
    let out = twinkernel(dir.path(), &["--config", "unknown.json", "verify"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    let out = twinkernel(dir.path(), &["--threads", "0", "transport"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_default_passes_and_corruption_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = twinkernel(dir.path(), &["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "equivariance.csv");
    assert_header(&csv);
    assert_eq!(csv.lines().nth(1).unwrap(), "g,k,lambda_true,mu_nystrom,rel_err,alignment");
    assert_eq!(csv.lines().count(), 2 + 3 * 7);

    let out = twinkernel(dir.path(), &["verify", "--corrupt-jacobian"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.lines().next().unwrap().starts_with("FAILED unitarity"), "{stderr}");
}

#[test]
fn verify_with_only_identity() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "cfg.json", r#"{"verify": {"basis": "HermiteProbabilist", "profile": {"kind": "Geometric", "rho": 0.5}, "groups": []}}"#);
    let out = twinkernel(dir.path(), &["--config", "cfg.json", "verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn simulate_bias_variance_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = twinkernel(dir.path(), &["--seed", "7", "simulate", "--study", "bias-variance", "--replicates", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "bias_variance.csv");
    assert_header(&csv);
    assert!(csv.lines().next().unwrap().ends_with(" seed=7"));
    assert_eq!(csv.lines().nth(1).unwrap(), "n,K,g,bias2,var_emp,mse,se");
    assert_eq!(csv.lines().count(), 2 + 2 * 3 * 2);
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "bias_variance.json")).unwrap();
    assert_eq!(json["report"]["replicates"], 10);
}

#[test]
fn transport_and_kernel_tables() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(twinkernel(dir.path(), &["transport"]).status.code(), Some(0));
    let csv = read(dir.path(), "transport.csv");
    assert_eq!(csv.lines().nth(1).unwrap(), "g,x,k,value");
    assert_eq!(csv.lines().count(), 2 + 2 * 81 * 6);
    assert_eq!(twinkernel(dir.path(), &["kernel-table"]).status.code(), Some(0));
    let csv = read(dir.path(), "kernel_table.csv");
    assert_eq!(csv.lines().nth(1).unwrap(), "g,x,y,value");
    assert_eq!(csv.lines().count(), 2 + 2 * 21 * 21);
}

#[test]
fn hash_ignores_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    twinkernel(dir.path(), &["transport"]);
    let a = read(dir.path(), "transport.csv");
    let other = dir.path().join("elsewhere");
    std::fs::create_dir_all(&other).unwrap();
    twinkernel(&other, &["transport"]);
    let b = std::fs::read_to_string(other.join("out").join("transport.csv")).unwrap();
    assert_eq!(a, b);
}
