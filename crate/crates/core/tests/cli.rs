use std::path::Path;
use std::process::Command;
use std::sync::Arc;

use bhk::fourier::{frequency_grid, gaussian_transform};
use bhk::grid::{GammaIndex, GridFunction, TensorGrid};
use bhk::poly::b_harmonic_basis;
use bhk::report::{VerificationReport, REPORT_SCHEMA};
use serde_json::Value;

fn bhk() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bhk"))
}

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn validate(report: &str) {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let instance: Value = serde_json::from_str(report).unwrap();
    let errors: Vec<String> = validator.iter_errors(&instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn special_suite_passes_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", "{}");
    let out = dir.path().join("r.json");
    let status = bhk().args(["run", "--suite", "special", "--config"]).arg(&config).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    validate(&text);
    let report: VerificationReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.summary.total, report.rows.len());
    assert!(report.rows.iter().any(|r| r.check == "j-half-closed-form"));
    let timing: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json.timing.json")).unwrap()).unwrap();
    assert_eq!(timing.as_array().unwrap().len(), 5);
}

#[test]
fn mean_value_constant_row() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", r#"{"gamma": [0.5, 1.5]}"#);
    let out = dir.path().join("r.json");
    let status = bhk().args(["run", "--suite", "mean-value", "--threads", "2", "--config"]).arg(&config).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    validate(&text);
    let report: VerificationReport = serde_json::from_str(&text).unwrap();
    let row = report.rows.iter().find(|r| r.check == "mvt-constant").unwrap();
    assert_eq!(row.expected, 0.25);
    assert!(row.pass);
}

#[test]
fn failing_row_gives_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", r#"{"tolerances": {"gamma-half-squared": 1e-30, "j-half-closed-form": 1e-30}}"#);
    let out = dir.path().join("r.json");
    let status = bhk().args(["run", "--suite", "special", "--config"]).arg(&config).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(1));
    let text = std::fs::read_to_string(&out).unwrap();
    validate(&text);
    let report: VerificationReport = serde_json::from_str(&text).unwrap();
    assert!(report.summary.failed >= 1);
    assert_eq!(report.summary.passed + report.summary.failed, report.summary.total);
}

#[test]
fn config_errors_give_exit_two_and_no_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    for body in ["{", r#"{"n": 3}"#, r#"{"gamma": [0.5, -1.0]}"#, r#"{"tolerances": {"x": -1}}"#, r#"{"unknown": 1}"#] {
        let config = write(dir.path(), "bad.json", body);
        let status = bhk().args(["run", "--suite", "special", "--config"]).arg(&config).arg("--out").arg(&out).status().unwrap();
        assert_eq!(status.code(), Some(2), "{body}");
        assert!(!out.exists(), "{body}");
    }
    let missing = dir.path().join("missing.json");
    let status = bhk().args(["run", "--suite", "special", "--config"]).arg(&missing).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let config = write(dir.path(), "c.json", "{}");
    let status = bhk().args(["run", "--suite", "bogus", "--config"]).arg(&config).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = bhk().args(["run", "--suite", "special", "--config"]).arg(&config).arg("--out").arg(&out).env("THREADS", "many").status().unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn output_defaults_to_config_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("from-config.json");
    let config = write(dir.path(), "c.json", &format!(r#"{{"output": {:?}}}"#, out.to_str().unwrap()));
    let status = bhk().args(["run", "--suite", "special", "--config"]).arg(&config).env("THREADS", "2").status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.exists());
}

#[test]
fn emit_gaussian_with_transform() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", r#"{"grid": {"x_max": 8, "points": 32}}"#);
    let out = dir.path().join("g.csv");
    let status = bhk().args(["emit", "--function", "gaussian", "--transform", "--config"]).arg(&config).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 1025);
    assert_eq!(csv.lines().next().unwrap(), "x_1,x_2,value");

    let transform = std::fs::read_to_string(dir.path().join("g.transform.csv")).unwrap();
    let first: Vec<f64> = transform.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    let g = GammaIndex::new(vec![0.5, 1.5]).unwrap();
    let want = gaussian_transform(&g, 1.0, &first[..2]).unwrap();
    assert!((first[2] - want).abs() <= 1e-6 * want);
    let freq = frequency_grid(&TensorGrid::new(g, 8.0, 32).unwrap()).unwrap();
    assert_eq!(first[0], freq.axis(0).nodes[0]);
}

#[test]
fn emit_b_harmonic_matches_samples() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", r#"{"grid": {"x_max": 8, "points": 32}}"#);
    let out = dir.path().join("p.csv");
    let status = bhk().args(["emit", "--function", "b-harmonic-k2", "--config"]).arg(&config).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(!dir.path().join("p.transform.csv").exists());
    let g = GammaIndex::new(vec![0.5, 1.5]).unwrap();
    let p = b_harmonic_basis(2, 2, &g).unwrap().remove(0);
    let grid = Arc::new(TensorGrid::new(g, 8.0, 32).unwrap());
    let f = GridFunction::read_csv(grid, std::io::BufReader::new(std::fs::File::open(&out).unwrap())).unwrap();
    let want = GridFunction::from_fn(f.grid().clone(), |x| p.eval(x).unwrap() * (-x[0] * x[0] - x[1] * x[1]).exp());
    for (a, b) in f.values().iter().zip(want.values().iter()) {
        assert!((a - b).abs() <= 1e-14 * (1.0 + b.abs()), "{a} vs {b}");
    }
    assert!(p.eval(&[0.0, 0.0]).unwrap().abs() < 1e-15);
}

#[test]
fn emit_unknown_function_fails() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", "{}");
    let out = dir.path().join("z.csv");
    let status = bhk().args(["emit", "--function", "nope", "--config"]).arg(&config).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(!out.exists());
}
