//! End-to-end runs of the `dvqtf` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dvqtf::sweep::HEADER;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dvqtf"));
    cmd.env_remove("DVQTF_WORKERS").env("RUST_BACKTRACE", "0");
    cmd
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn dvqtf");
    assert!(
        out.status.success(),
        "dvqtf failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("sweep.json");
    std::fs::write(&path, body).unwrap();
    path
}

const SMALL: &str = r#"{"eta": 0.4, "n_b": 0.2, "d": 3, "m_grid": [20, "inf"],
    "rules": ["first_click", "r_clicks", {"truncated_first_click": 6}], "r_grid": [2],
    "trials": 5000, "seed": 3}"#;

#[test]
fn version_flag() {
    let out = run(bin().arg("--version"));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("dvqtf "));
}

#[test]
fn golden_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = run(bin().args(["bounds", "--config"]).arg(&cfg));
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "eta,n_b,d,m,rule,r_or_n,p_tp,p_fp,analytic_classical_lb,analytic_tmsv_ub,\
         analytic_tmsv_ub_clamped,analytic_fixed_shot_error,analytic_truncated_energy,\
         analytic_truncated_error,analytic_expected_transmissions,analytic_energy,\
         analytic_first_click_bound,analytic_first_click_bound_clamped,analytic_chernoff_constant,\
         analytic_r_click_bound,analytic_r_click_bound_clamped,analytic_series,analytic_series_tail,\
         mc_error,mc_ci_low,mc_ci_high,mc_mean_transmissions,mc_mean_photons,seed,error"
    );
    assert_eq!(header, HEADER.join(","));
    assert_eq!(text.lines().count(), 1 + 2 * 3);
}

#[test]
fn simulate_is_byte_identical_across_workers_and_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    run(bin()
        .args(["simulate", "--workers", "1", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&a));
    run(bin()
        .args(["simulate", "--workers", "8", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&b));
    run(bin()
        .env("DVQTF_WORKERS", "3")
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&c));
    let a = std::fs::read(a).unwrap();
    assert_eq!(a, std::fs::read(b).unwrap());
    assert_eq!(a, std::fs::read(c).unwrap());

    let d = dir.path().join("d.csv");
    run(bin()
        .args(["simulate", "--seed", "4", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&d));
    assert_ne!(a, std::fs::read(d).unwrap());
}

#[test]
fn json_mirror_has_same_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let csv_path = dir.path().join("t.csv");
    let json_path = dir.path().join("t.json");
    run(bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&csv_path)
        .arg("--json")
        .arg(&json_path));
    let rows: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(json_path).unwrap()).unwrap();
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let csv_rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), csv_rows.len());
    for (json, rec) in rows.iter().zip(&csv_rows) {
        let mc: f64 = rec[23].parse().unwrap();
        assert_eq!(json["mc_error"].as_f64().unwrap(), mc);
        assert_eq!(json["rule"].as_str().unwrap(), &rec[4]);
    }
}

#[test]
fn figure_one_config_columns_are_recomputable() {
    let out = run(bin()
        .args(["bounds", "--config"])
        .arg(shipped("figure-1-style.json")));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let mut prev = f64::INFINITY;
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        let d: f64 = rec[col("d")].parse().unwrap();
        let p: f64 = rec[col("p_tp")].parse().unwrap();
        let n: i32 = rec[col("r_or_n")].parse().unwrap();
        let err: f64 = rec[col("analytic_truncated_error")].parse().unwrap();
        let energy: f64 = rec[col("analytic_truncated_energy")].parse().unwrap();
        assert_eq!(&rec[col("m")], "inf");
        assert!((err - (1.0 - p).powi(n)).abs() <= 1e-15);
        assert!((energy - d / p * (1.0 - (1.0 - p).powi(n))).abs() <= 1e-12 * energy);
        assert!(err < prev);
        prev = err;
        rows += 1;
    }
    assert!(rows > 5);
}

#[test]
fn figure_two_config_bound_decreases_in_m() {
    let out = run(bin()
        .args(["bounds", "--config"])
        .arg(shipped("figure-2-style.json")));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let mut by_r: std::collections::BTreeMap<u64, Vec<(u64, f64)>> = Default::default();
    for rec in reader.records() {
        let rec = rec.unwrap();
        let m: u64 = rec[col("m")].parse().unwrap();
        let r: u64 = rec[col("r_or_n")].parse().unwrap();
        let b: f64 = rec[col("analytic_r_click_bound")].parse().unwrap();
        by_r.entry(r).or_default().push((m, b));
    }
    assert_eq!(by_r.len(), 5);
    for points in by_r.values() {
        for w in points.windows(2) {
            assert!(w[0].0 < w[1].0 && w[0].1 > w[1].1, "{points:?}");
        }
    }
}

#[test]
fn invalid_config_fails_with_key_name() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"eta": 0.2, "n_b": 1.0, "d": 5, "rules": ["first_click"], "trials": 0}"#,
    );
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("trials"));

    let out = bin()
        .args(["bounds", "--config", "/nonexistent/x.json"])
        .output()
        .unwrap();
    assert!(!out.status.success());

    let out = bin().args(["simulate"]).output().unwrap();
    assert!(!out.status.success());
}
