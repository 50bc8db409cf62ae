//! End-to-end runs of the `wspec` binary.

use std::path::Path;
use std::process::{Command, Output};

fn wspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wspec"))
        .args(args)
        .env("WSPEC_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn mlf_at_minus_one() {
    let o = wspec(&["mlf", "--alpha", "1", "--mu", "1", "--z", "-1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("0.3678794412"), "{}", stdout(&o));
}

#[test]
fn green_classical_limit_table() {
    let o = wspec(&[
        "green", "--alpha", "1", "--beta", "1", "--s", "1", "--probes", "0,1,2", "--routes", "all", "--bounds", "-30,30",
        "--sizes", "1024", "--csv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows[0][..5], ["t", "x0", "spectral", "mellin", "foxh"]);
    assert_eq!(rows.len(), 4);
    for row in &rows[1..] {
        let x: f64 = row[1].parse().unwrap();
        let exact = (-x * x / 4.0).exp() / (4.0 * std::f64::consts::PI).sqrt();
        for v in &row[2..5] {
            let v: f64 = v.parse().unwrap();
            assert!((v - exact).abs() < 1e-6 * exact, "x={x}: {v} vs {exact}");
        }
    }
}

#[test]
fn validate_passes_and_is_deterministic() {
    let a = wspec(&["validate"]);
    let b = wspec(&["validate"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["all_passed"], true);
    assert_eq!(report["checks"].as_array().unwrap().len(), 12);
}

#[test]
fn identical_config_gives_identical_bytes() {
    let args = ["transform", "--geometry", "sinh", "--geometry-params", "0.5", "--sizes", "128", "--csv"];
    assert_eq!(wspec(&args).stdout, wspec(&args).stdout);
}

#[test]
fn alpha_out_of_range_is_a_config_error() {
    let o = wspec(&["green", "--alpha", "2.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha must lie in (0, 2]"), "{}", stderr(&o));
}

#[test]
fn unknown_catalog_entry_exits_two() {
    let o = wspec(&["transform", "--geometry", "moebius"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: "));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("green.csv");
    let plot = dir.path().join("plots").join("green");
    std::fs::create_dir_all(plot.parent().unwrap()).unwrap();
    std::fs::write(
        &cfg,
        format!(
            "alpha = 0.9\nbeta = 1.0\ns = 1.0\n[run]\nprobes = [0.5, 1.0]\nroutes = [\"mellin\", \"foxh\"]\n[output]\npath = {:?}\nplot = {:?}\n",
            out, plot
        ),
    )
    .unwrap();
    let o = wspec(&["green", "-c", cfg.to_str().unwrap(), "--alpha", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.contains("# command: green"));
    assert!(csv.contains("# config_sha256: "));
    let rows = data_rows(&csv);
    let v: f64 = rows[1][2].parse().unwrap();
    // --alpha 1 overrides the file's 0.9: heat kernel at x = 0.5.
    let exact = (-0.0625f64).exp() / (4.0 * std::f64::consts::PI).sqrt();
    assert!((v - exact).abs() < 1e-8 * exact, "{v}");
    assert!(Path::new(&format!("{}.svg", plot.display())).exists());
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "alpah = 1.0\n").unwrap();
    let o = wspec(&["mlf", "-c", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpah"), "{}", stderr(&o));
}
