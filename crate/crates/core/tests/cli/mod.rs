//! End-to-end runs of the `hwfpt` binary against direct library calls.

use hwfpt::inversion::{invert_density, log_grid};
use hwfpt::moments::{mean_asymptotic, mean_exact, mean_via_transform, MeanRegime};
use hwfpt::simulate::{mc_passage, McConfig, StepOptions};
use hwfpt::spectral::{theta_max, theta_max_asym, ThetaFormula};
use hwfpt::transforms::laplace;
use hwfpt::{Complex64, ModelParams};
use serde_json::Value;
use std::process::{Command, Output};

fn hwfpt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hwfpt")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = hwfpt(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv(args: &[&str]) -> (Vec<String>, Vec<Vec<String>>) {
    let out = hwfpt(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn p(beta: f64, b: f64, x: f64) -> ModelParams {
    ModelParams::new(beta, b, x).unwrap()
}

#[test]
fn transform_is_bit_identical() {
    let v = json(&["transform", "--beta", "1", "--b", "2", "--x", "-1", "--theta-re", "0.7", "--theta-im", "-2.5"]);
    let l = laplace(Complex64::new(0.7, -2.5), p(1.0, 2.0, -1.0)).unwrap();
    assert_eq!(num(&v["mantissa_re"]), l.value.re);
    assert_eq!(num(&v["mantissa_im"]), l.value.im);
    assert_eq!(num(&v["log_scale"]), l.log_scale);

    let v = json(&["transform", "--beta", "1", "--b", "2", "--x", "-1", "--theta-re", "0"]);
    assert!((num(&v["value_re"]) - 1.0).abs() < 1e-10);
}

#[test]
fn mean_is_bit_identical_in_both_formats() {
    let pr = p(1.0, 1.0, 0.0);
    let exact = mean_exact(pr).unwrap().value;
    let deriv = mean_via_transform(pr).unwrap().value;
    let v = json(&["mean", "--beta", "1", "--b", "1", "--x", "0"]);
    assert_eq!(num(&v["exact"]), exact);
    assert_eq!(num(&v["transform_derivative"]), deriv);
    assert!(num(&v["relative_gap"]) < 1e-6);

    let (header, rows) = csv(&["mean", "--beta", "1", "--b", "1", "--format", "csv"]);
    assert_eq!(header, ["exact", "exact_method", "transform_derivative", "relative_gap"]);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), exact);
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), deriv);
}

#[test]
fn theta_max_fields() {
    let v = json(&["theta-max", "--beta", "0", "--b", "20", "--format", "json"]);
    let r = theta_max(p(0.0, 20.0, 0.0)).unwrap();
    assert_eq!(num(&v["theta_max"]), r.theta_max);
    assert_eq!(num(&v["residual"]), r.residual);
    assert_eq!(v["seed_source"], "large_level_zero_drift");
    assert_eq!(v["asymptotic_formula"], "large_level_zero_drift");
    let asym = theta_max_asym(p(0.0, 20.0, 0.0), ThetaFormula::LargeLevelZeroDrift).unwrap();
    assert_eq!(num(&v["asymptotic"]), asym);
}

#[test]
fn density_csv_round_trips() {
    let (header, rows) =
        csv(&["density", "--beta", "1", "--b", "1", "--t-min", "0.01", "--t-max", "50", "--t-points", "33", "--format", "csv"]);
    assert_eq!(header, ["t", "density", "cdf"]);
    let grid = log_grid(0.01, 50.0, 33);
    let c = invert_density(p(1.0, 1.0, 0.0), &grid).unwrap();
    assert_eq!(rows.len(), 33);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0].parse::<f64>().unwrap(), grid[i]);
        assert_eq!(r[1].parse::<f64>().unwrap(), c.density[i]);
        assert_eq!(r[2].parse::<f64>().unwrap(), c.cdf[i]);
        assert_eq!(r[1].split('e').next().unwrap().trim_start_matches('-').len(), 18, "17 significant digits");
    }
}

#[test]
fn density_json_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    let out = hwfpt(&[
        "density", "--beta", "-1", "--b", "1", "--x", "0.5", "--t-min", "0.05", "--t-max", "5", "--t-points", "9",
        "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let c = invert_density(p(-1.0, 1.0, 0.5), &log_grid(0.05, 5.0, 9)).unwrap();
    let got: Vec<f64> = v["density"].as_array().unwrap().iter().map(num).collect();
    assert_eq!(got, c.density);
    assert_eq!(v["method"], "talbot");
    assert!(v["provenance"]["command"].as_str().unwrap().starts_with("hwfpt density --beta -1 --b 1 --x 0.5"));
}

#[test]
fn simulate_matches_library_and_dumps_samples() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("t.txt");
    let v = json(&[
        "simulate", "--beta", "1", "--b", "1.5", "--n-paths", "3000", "--dt", "0.002", "--seed", "42", "--bridge",
        "--raw-dump", dump.to_str().unwrap(),
    ]);
    let mut cfg = McConfig::new(p(1.0, 1.5, 0.0), 3000, 42).unwrap();
    cfg.step = StepOptions { dt: 0.002, bridge: true };
    cfg.keep_samples = true;
    let s = mc_passage(cfg).unwrap();
    assert_eq!(num(&v["mean"]), s.mean);
    assert_eq!(num(&v["stderr"]), s.stderr);
    assert_eq!(num(&v["quantiles"]["p50"]), s.quantiles.p50);
    assert_eq!(v["provenance"]["seed"], 42);
    let dumped: Vec<f64> = std::fs::read_to_string(&dump).unwrap().lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(&dumped, s.samples.as_ref().unwrap());
}

#[test]
fn asymptotic_formulas() {
    let v = json(&["asymptotic", "--beta", "1", "--b", "12", "--formula", "mean-large-level"]);
    let pr = p(1.0, 12.0, 0.0);
    assert_eq!(num(&v["value"]), mean_asymptotic(pr, MeanRegime::LargeLevel).unwrap().value);
    assert_eq!(num(&v["reference"]), mean_exact(pr).unwrap().value);

    let v = json(&["asymptotic", "--beta", "-40", "--b", "0.2924", "--formula", "theta-small-level"]);
    let pr = p(-40.0, 0.2924, 0.0);
    assert_eq!(num(&v["value"]), theta_max_asym(pr, ThetaFormula::SmallLevel).unwrap());
    assert!(num(&v["relative_gap"]) < 0.02);
}

#[test]
fn validate_single_criterion() {
    let out = hwfpt(&["validate", "--criterion", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("criterion  1: PASS"));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| hwfpt(args).status.code();
    assert_eq!(code(&["density", "--beta", "1"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["validate", "--criterion", "14"]), Some(2));
    assert_eq!(code(&["mean", "--beta", "1", "--b", "-1"]), Some(2));
    assert_eq!(code(&["asymptotic", "--beta", "1", "--b", "2", "--formula", "mean-undercapacity"]), Some(3));
    assert_eq!(code(&["theta-max", "--beta", "1", "--b", "1", "--output", "/nonexistent-dir/out.json"]), Some(4));
    // A criterion that fails by construction (documented asymptotic gap) gives 1.
    assert_eq!(code(&["validate", "--criterion", "7"]), Some(1));
}

#[test]
fn usage_errors_name_the_flag() {
    let out = hwfpt(&["transform", "--beta", "1", "--b", "2", "--theta-re", "abc"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--theta-re"));
    let out = hwfpt(&["mean", "--beta", "nan", "--b", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--beta"));
}
