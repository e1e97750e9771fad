use std::process::{Command, Output};

use mixent::bounds::{sandwich_report, CSV_HEADER};
use mixent::{DiscreteLattice, QuadratureConfig};

fn mixent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixent"))
        .args(args)
        .env_remove("MIXENT_QUAD_ABS_TOL")
        .env_remove("MIXENT_QUAD_REL_TOL")
        .env_remove("MIXENT_QUAD_MAX_SUBDIVISIONS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

#[test]
fn entropy_json_for_fair_bernoulli() {
    let o = mixent(&[
        "entropy",
        "--sigma",
        "0.25",
        "--dist",
        r#"{"bernoulli":0.5}"#,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let d = v["delta_direct"]["nats"].as_f64().unwrap();
    assert!((d - 0.060_426_986_823_078_3).abs() < 1e-10);
    assert!((v["H"]["nats"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
    assert_eq!(v["converged"], true);
    assert!(v.get("h_sum_mc").is_none());
}

#[test]
fn entropy_point_mass_has_zero_deficit() {
    let o = mixent(&[
        "entropy",
        "--sigma",
        "0.3",
        "--dist",
        r#"{"support":[4],"probs":[1.0]}"#,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["delta_direct"]["nats"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn entropy_with_monte_carlo_column() {
    let o = mixent(&[
        "--mc-samples",
        "20000",
        "entropy",
        "--sigma",
        "0.5",
        "--dist",
        r#"{"bernoulli":0.3}"#,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let mc = v["h_sum_mc"]["nats"].as_f64().unwrap();
    let q = v["h_sum"]["nats"].as_f64().unwrap();
    let se = v["h_sum_mc"]["abs_error"].as_f64().unwrap();
    assert!((mc - q).abs() < 5.0 * se);
}

#[test]
fn malformed_distribution_is_usage_error() {
    let o = mixent(&[
        "entropy",
        "--sigma",
        "0.25",
        "--dist",
        r#"{"support":[0,1],"probs":[0.5,0.4]}"#,
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sum to 1"));
    assert!(o.stdout.is_empty());
}

#[test]
fn non_positive_sigma_is_usage_error() {
    let o = mixent(&["entropy", "--sigma", "0", "--dist", r#"{"bernoulli":0.5}"#]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_small_sigma_rows_all_ok() {
    let o = mixent(&[
        "sweep",
        "--sigma-start",
        "0.15",
        "--sigma-end",
        "0.45",
        "--steps",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 7);
    for r in &rows {
        assert_eq!(r.len(), 10);
        assert_eq!(r[9], "true");
        assert!(!r[6].is_empty(), "thm1 present below ½");
        assert!(r[8].is_empty(), "bigsig absent below ½");
    }
    let first: f64 = rows[0][0].parse().unwrap();
    let last: f64 = rows[6][0].parse().unwrap();
    assert!((first - 0.15).abs() < 1e-12 && (last - 0.45).abs() < 1e-12);
}

#[test]
fn sweep_large_sigma_switches_bounds() {
    let o = mixent(&[
        "sweep",
        "--sigma-start",
        "0.5",
        "--sigma-end",
        "2",
        "--steps",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines().skip(1) {
        let r: Vec<&str> = line.split(',').collect();
        assert!(
            r[5].is_empty() && r[6].is_empty(),
            "lemma4/thm1 absent: {line}"
        );
        assert!(r[7].is_empty(), "bern_lb absent: {line}");
        assert!(!r[8].is_empty(), "bigsig present: {line}");
        assert_eq!(r[9], "true");
    }
}

#[test]
fn single_step_sweep_matches_library() {
    let o = mixent(&[
        "sweep",
        "--sigma-start",
        "0.3",
        "--sigma-end",
        "0.3",
        "--steps",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rep = sandwich_report(
        &DiscreteLattice::bernoulli(0.5).unwrap(),
        0.3,
        &QuadratureConfig::default(),
    )
    .unwrap();
    let text = stdout(&o);
    assert_eq!(text.lines().nth(1), Some(rep.csv_row().as_str()));
}

#[test]
fn sweep_json_format() {
    let o = mixent(&[
        "--format",
        "json",
        "sweep",
        "--sigma-start",
        "0.2",
        "--sigma-end",
        "0.4",
        "--steps",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn validate_quick_passes() {
    let o = mixent(&["validate", "--quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 10);
}

#[test]
fn impossible_tolerance_fails_validation() {
    let o = mixent(&[
        "--quad-abs-tol",
        "1e-30",
        "--quad-rel-tol",
        "1e-30",
        "validate",
        "--quick",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn tolerance_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_mixent"))
        .args([
            "entropy",
            "--sigma",
            "0.25",
            "--dist",
            r#"{"bernoulli":0.5}"#,
        ])
        .env("MIXENT_QUAD_ABS_TOL", "1e-30")
        .env("MIXENT_QUAD_REL_TOL", "1e-30")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stdout.is_empty());
    assert_eq!(json(&o)["converged"], false);
}

#[test]
fn landauer_fair_bit() {
    let o = mixent(&["landauer", "--mu", "0.5", "--sigma", "0.1", "--p1", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let dh = v["delta_h"].as_f64().unwrap();
    let env = v["envelope"].as_f64().unwrap();
    assert!((dh - std::f64::consts::LN_2).abs() <= env);
    assert!((env - 1.784_063_417_681_16e-5).abs() < 1e-15);
}

#[test]
fn landauer_bits_and_biased_bit() {
    let o = mixent(&[
        "landauer", "--mu", "1", "--sigma", "0.2", "--p1", "0.2", "--bits",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["units"], "bits");
    let ideal = v["ideal"].as_f64().unwrap();
    let hb = -(0.2f64 * 0.2f64.log2() + 0.8 * 0.8f64.log2());
    assert!((ideal - hb).abs() < 1e-14);
}

#[test]
fn landauer_bad_probability_is_usage_error() {
    let o = mixent(&["landauer", "--mu", "0.5", "--sigma", "0.1", "--p1", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_usage_error() {
    assert_eq!(mixent(&["entropy", "--bogus"]).status.code(), Some(2));
}

#[test]
fn repeat_runs_are_byte_identical() {
    let args = [
        "--mc-samples",
        "100000",
        "--seed",
        "7",
        "entropy",
        "--sigma",
        "0.2",
        "--dist",
        r#"{"uniform_support":3}"#,
    ];
    let a = mixent(&args);
    let b = mixent(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
