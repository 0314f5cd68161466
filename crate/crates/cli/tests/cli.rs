use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(kind: &str, config: &str, dir: &Path, extra: &[&str]) -> Output {
    let cfg = dir.join("config.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_weyl-lab"))
        .arg(kind)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn malformed_domain_exits_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("spectrum", "domains = [\n  \"rect 1 1\",\n  \"disk one\",\n]\n", dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3, column 9"), "{}", stderr(&o));
}

#[test]
fn remainder_grid_beyond_cutoff_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "domains = [\"rect 1 1\"]\n[spectrum]\ncutoff = 1e3\n[remainder]\nlo = 1e2\nhi = 1e4\n";
    let o = run("weyl-remainder", cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("only complete below"), "{}", stderr(&o));
}

#[test]
fn monte_carlo_without_seed_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "domains = [\"rect 1 1\"]\n[regions]\nepsilon = 0.5\nr = 0.2\nl0 = 0.02\nsamples = 100\n";
    assert_eq!(run("regions", cfg, dir.path(), &[]).status.code(), Some(2));
    assert_eq!(run("regions", cfg, dir.path(), &["--seed", "4"]).status.code(), Some(0));
}

#[test]
fn output_is_independent_of_thread_count() {
    let cfg = "domains = [\"rect 1 1\", \"random 6 3\"]\nseed = 5\n[goodset]\nepsilon = 0.6\nr = 0.2\ns = [0.01]\nsamples = 20000\n";
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let o = run("goodset", cfg, dir.path(), &["--threads", threads]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        outputs.push(fs::read(dir.path().join("out/goodset.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn csv_starts_with_units_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("riesz", "domains = [\"rect 1 1\"]\n[riesz]\nlambdas = [100.0]\ngammas = [1.0]\n", dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("out/riesz.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# units:"));
    assert_eq!(lines[1], "domain,lambda,gamma,riesz_mean,berezin_bound");
    let row: Vec<f64> = lines[2].split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    assert!((row[2] - (600.0 - 40.0 * std::f64::consts::PI.powi(2))).abs() < 1e-10);
    let summary = fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("result: 1 checks, 0 failed"));
}

#[test]
fn check_all_subset_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "domains = [\"rect 1 1\", \"disk 1\", \"random 5 7\"]\nseed = 7\n[check]\ncriteria = [1, 2, 3, 4, 7, 9]\nrandom_polygons = 20\n";
    let o = run("check-all", cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("out/checks.csv")).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains(",PASS,")).count(), 6);
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // a ladder this coarse leaves the tilted complement contaminated
    let cfg = "[cone]\nepsilon = [0.5]\nsides = [\"complement\"]\nladder = [4.0, 8.0]\n";
    let o = run("cone-trace", cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("failed: eps 0.5 complement"));
}
