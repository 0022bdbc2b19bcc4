//! End-to-end runs of the binary: exit codes, file contracts, and the
//! worker-count determinism gate (byte-identical CSV).

use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_cocycle-lab");

const DIAG_CONFIG: &str = r#"
experiment = "estimate"

[model]
kind = "atoms"

[[model.atoms]]
weight = 1.0
alpha = 0.0
matrix = [2.0, 0.0, 0.0, 0.5]

[estimator]
n = 10000
n_samples = 10
seed = 1
"#;

const SWEEP_CONFIG: &str = r#"
experiment = "sweep"

[model]
kind = "op1"
alpha = 0.61803398874989485
noise_atoms = [[0.5, 0.0], [0.5, 1.0]]
harmonics = [[1, 2.0, 0.0]]

[estimator]
n = 2000
n_samples = 20
seed = 42
energies = [-1.0, 0.0, 1.0]
"#;

fn run_in(dir: &Path, sub: &str, config: &str, extra: &[&str]) -> std::process::Output {
    let cfg_path = dir.join("config.toml");
    std::fs::write(&cfg_path, config).unwrap();
    Command::new(BIN)
        .arg(sub)
        .arg("--config")
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir)
        .args(extra)
        .env_remove("COCYCLE_LAB_WORKERS")
        .output()
        .unwrap()
}

#[test]
fn estimate_constant_diagonal_writes_log_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "estimate", DIAG_CONFIG, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "model,E,L1,stderr,n,n_samples,seed");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "atoms");
    let l1: f64 = row[2].parse().unwrap();
    let stderr: f64 = row[3].parse().unwrap();
    assert!((l1 - 2.0f64.ln()).abs() < 1e-12);
    assert_eq!(stderr, 0.0);
    // manifest checksum matches the emitted file
    let manifest = std::fs::read_to_string(dir.path().join("manifest.toml")).unwrap();
    assert!(manifest.contains("results.csv"));
    use sha2::Digest;
    let hex: String = sha2::Sha256::digest(csv.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    assert!(manifest.contains(&hex), "checksum missing from manifest");
}

#[test]
fn jsonl_dump_has_one_line_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "estimate", DIAG_CONFIG, &["--jsonl"]);
    assert!(out.status.success());
    let jsonl = std::fs::read_to_string(dir.path().join("samples.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 10);
    assert!(jsonl.lines().all(|l| l.starts_with("{\"sample\":")));
}

#[test]
fn acceptance_11_worker_count_invariance() {
    let base = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (i, workers) in ["1", "4", "4"].iter().enumerate() {
        let dir = base.path().join(format!("run{i}"));
        std::fs::create_dir(&dir).unwrap();
        let out = run_in(&dir, "sweep", SWEEP_CONFIG, &["--workers", workers]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(dir.join("results.csv")).unwrap());
    }
    let pass = outputs[0] == outputs[1] && outputs[1] == outputs[2];
    println!(
        "[acceptance 11] worker-count determinism: {} (1 vs 4 workers, repeated run)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "CSV bytes differ across worker counts");
}

#[test]
fn workers_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("config.toml");
    std::fs::write(&cfg_path, SWEEP_CONFIG).unwrap();
    let out = Command::new(BIN)
        .args(["sweep", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path())
        .env("COCYCLE_LAB_WORKERS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bad = Command::new(BIN)
        .args(["sweep", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path())
        .env("COCYCLE_LAB_WORKERS", "soon")
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("COCYCLE_LAB_WORKERS"));
}

#[test]
fn invalid_config_leaves_no_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let bad = DIAG_CONFIG.replace("n_samples = 10", "n_samples = 0");
    let out = run_in(dir.path(), "estimate", &bad, &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_samples must be >= 1"));
    assert!(!dir.path().join("manifest.toml").exists());
    assert!(!dir.path().join("results.csv").exists());
}

#[test]
fn subcommand_must_match_config_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "spectrum", DIAG_CONFIG, &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("estimate"));
    assert!(!dir.path().join("manifest.toml").exists());
}

#[test]
fn sweep_svg_plot_is_emitted_and_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "sweep", SWEEP_CONFIG, &["--svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(dir.path().join("curve.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<circle").count(), 3);
    let manifest = std::fs::read_to_string(dir.path().join("manifest.toml")).unwrap();
    assert!(manifest.contains("curve.svg"));
}

#[test]
fn criteria_verdict_lands_in_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
experiment = "criteria"

[model]
kind = "op1"
alpha = 0.61803398874989485
noise_atoms = [[0.5, 0.0], [0.5, 1.0]]
harmonics = [[1, 2.0, 0.0]]
energy = 0.0
"#;
    let out = run_in(dir.path(), "criteria", cfg, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = std::fs::read_to_string(dir.path().join("manifest.toml")).unwrap();
    assert!(manifest.contains("positivity-predicted"), "{manifest}");
    let report = std::fs::read_to_string(dir.path().join("criteria.txt")).unwrap();
    assert!(report.contains("verdict = positivity-predicted"), "{report}");
}

#[test]
fn seed_flag_overrides_config() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    let a = run_in(dir1.path(), "sweep", SWEEP_CONFIG, &["--seed", "7"]);
    let b = run_in(dir2.path(), "sweep", SWEEP_CONFIG, &[]);
    assert!(a.status.success() && b.status.success());
    let csv1 = std::fs::read(dir1.path().join("results.csv")).unwrap();
    let csv2 = std::fs::read(dir2.path().join("results.csv")).unwrap();
    assert_ne!(csv1, csv2);
    let manifest = std::fs::read_to_string(dir1.path().join("manifest.toml")).unwrap();
    assert!(manifest.contains("seed = 7"));
}
