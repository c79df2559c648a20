use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_margulis-bounds")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn data_rows(stdout: &[u8]) -> Vec<String> {
    String::from_utf8_lossy(stdout).lines().filter(|l| !l.starts_with('#')).skip(1).map(String::from).collect()
}

#[test]
fn reference_cover_prints_one_eighteenth() {
    let o = bin(&["covering-bound", "--mu1", "1", "--mu2", "1", "--mu12", "1"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("mu_1 >= 0.0555555"));
}

#[test]
fn missing_mu_is_usage_error() {
    let o = bin(&["covering-bound", "--mu1", "1", "--mu12", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--mu2"));
}

#[test]
fn zero_overlap_eigenvalue_is_numerical_failure() {
    let o = bin(&["covering-bound", "--mu1", "1", "--mu2", "1", "--mu12", "0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn tube_spectrum_sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[experiment]\nradii = [5.0, 10.0, 20.0]\n");
    let o = bin(&["tube-spectrum", "--config", &cfg, "--mesh-n", "512"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&o.stdout);
    assert_eq!(rows.len(), 3);
    for r in rows {
        let v: f64 = r.split(',').nth(4).unwrap().parse().unwrap();
        assert!(v > 1.0 && v < 5.0, "{v}");
    }
    let head = String::from_utf8_lossy(&o.stdout).lines().next().unwrap().to_string();
    assert!(head.contains("config-sha256=") && head.contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn tsv_format() {
    let o = bin(&["theorem2", "--format", "tsv", "--mesh-n", "128"]);
    assert!(o.status.success());
    let rows = data_rows(&o.stdout);
    assert_eq!(rows.len(), 57);
    assert_eq!(rows[0].split('\t').count(), 7);
}

#[test]
fn theorem2_flags_first_filling() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[experiment]\ni_range = [1, 4]\n");
    let o = bin(&["theorem2", "--config", &cfg, "--mesh-n", "128"]);
    assert!(o.status.success());
    let rows = data_rows(&o.stdout);
    assert_eq!(rows[0].split(',').nth(3), Some("false"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("regime |b| >= R|a| fails for i = 1"));
}

#[test]
fn empty_sweep_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[experiment]\nradii = []\n");
    let o = bin(&["tube-spectrum", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("experiment.radii"));
}

#[test]
fn malformed_config_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[constants]\nc_primo = 2.0\n");
    let o = bin(&["theorem1", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("c_primo"));
    let cfg = write_config(dir.path(), "[constants]\nbig_c = -1.0\n");
    let o = bin(&["theorem1", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("constants.big_c"));
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("out.csv");
    let o = bin(&["theorem2", "--mesh-n", "64", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn two_tube_normalization_bounded_below() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[experiment]\nk = 2\n");
    let o = bin(&["theorem1", "--config", &cfg, "--mesh-n", "256"]);
    assert!(o.status.success());
    for r in data_rows(&o.stdout) {
        let v: f64 = r.split(',').nth(5).unwrap().parse().unwrap();
        assert!(v > 1.0, "{v}");
    }
}

#[test]
fn convergence_command_reports_order() {
    let o = bin(&["convergence"]);
    assert!(o.status.success());
    let s = String::from_utf8_lossy(&o.stdout).to_string();
    let line = s.lines().find(|l| l.starts_with("# estimated order")).unwrap();
    let order: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(order > 1.8, "{order}");
}
