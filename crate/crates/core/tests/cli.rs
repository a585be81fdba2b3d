use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use phasematch::fit::{fit_objective, Objective};
use phasematch::two_pair::solve_phases_for_roots;
use phasematch::{uniform_grid, MarkedFraction};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasematch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

const SAMPLE_ALPHAS: &str = "3.78753,4.07795,4.13749,4.18949,1.48562,5.23604";

fn reference_alphas() -> String {
    phasematch::fit::REFERENCE_ALPHAS_OVER_PI
        .iter()
        .map(|a| format!("{}", a * std::f64::consts::PI))
        .collect::<Vec<_>>()
        .join(",")
}

#[test]
fn profile_hits_unity_at_quarter() {
    let o = run(&[
        "profile",
        "--alphas",
        "3.141592653589793",
        "--betas",
        "-3.141592653589793",
        "--grid",
        "0:1:5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["lambda", "P1"]);
    let row = rows.iter().find(|r| r[0] == 0.25).unwrap();
    assert!((row[1] - 1.0).abs() < 1e-12);
}

#[test]
fn profile_of_reference_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let alphas = reference_alphas();
    let o = run(&[
        "profile",
        "--alphas",
        &alphas,
        "--grid",
        "0.001:1:1000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(header, ["lambda", "P1", "P2", "P3", "P4", "P5", "P6"]);
    assert_eq!(rows.len(), 1000);
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0]));
    let floor = rows
        .iter()
        .filter(|r| r[0] >= 0.1)
        .map(|r| r[6])
        .fold(f64::INFINITY, f64::min);
    // The reference phases dip to 0.99798 near λ = 0.155, just under 0.998.
    assert!(floor > 0.9979 && floor < 0.9985, "{floor}");
    let spread = rows.iter().map(|r| (r[5] - r[6]).abs()).fold(0.0, f64::max);
    assert!(spread > 0.1);
}

#[test]
fn profile_output_is_deterministic() {
    let a = run(&["profile", "--alphas", SAMPLE_ALPHAS, "--grid", "0:1:257"]);
    let b = run(&["profile", "--alphas", SAMPLE_ALPHAS, "--grid", "0:1:257"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn profile_repeat_count() {
    let o = run(&[
        "profile",
        "--alphas",
        "1.5707963267948966",
        "--k",
        "3",
        "--grid",
        "0:1:11",
    ]);
    let (header, _) = csv_rows(&stdout(&o));
    assert_eq!(header.len(), 4);
}

#[test]
fn profile_requires_schedule() {
    let o = run(&["profile", "--grid", "0:1:5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["profile", "--alphas", "1.0", "--grid", "0:1:1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["profile", "--alphas", "1.0", "--betas", "1.0,2.0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_schedule_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\n  \"alphas\": [1.0],\n  \"betas\": [oops]\n}\n").unwrap();
    let o = run(&["profile", "--schedule", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn schedule_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let s = phasematch::reference_schedule();
    fs::write(&path, s.to_json()).unwrap();
    let a = run(&["roots", "--schedule", path.to_str().unwrap(), "--bracket", "0.05:1"]);
    assert_eq!(a.status.code(), Some(0));
    let v = json(&a);
    assert_eq!(v["unit_roots"].as_array().unwrap().len(), 6);
    assert_eq!(v["local_minima"].as_array().unwrap().len(), 6);
}

#[test]
fn fit_six_phases_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (r1, r2, p1) = (
        dir.path().join("r1.json"),
        dir.path().join("r2.json"),
        dir.path().join("p1.csv"),
    );
    let o = run(&[
        "fit",
        "--k",
        "6",
        "--seed",
        "3",
        "--out",
        r1.to_str().unwrap(),
        "--profile-out",
        p1.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["fit", "--k", "6", "--seed", "3", "--out", r2.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(&r1).unwrap(), fs::read(&r2).unwrap());
    let v: Value = serde_json::from_str(&fs::read_to_string(&r1).unwrap()).unwrap();
    let roots = v["unit_roots"].as_array().unwrap();
    assert_eq!(roots.len(), 6);
    assert!(roots
        .iter()
        .all(|r| r.as_f64().unwrap() > 0.0 && r.as_f64().unwrap() < 1.0));
    let (header, rows) = csv_rows(&fs::read_to_string(&p1).unwrap());
    assert_eq!(header.len(), 7);
    assert_eq!(rows.len(), 512);
}

#[test]
fn fit_two_phases_beats_golden_pair_on_its_grid() {
    let o = run(&["fit", "--k", "2", "--grid", "0.095:1:512"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["unit_roots"].as_array().unwrap().len(), 2);
    let golden =
        &solve_phases_for_roots(MarkedFraction::new(0.4).unwrap(), MarkedFraction::new(0.8).unwrap()).unwrap()[0];
    let grid = uniform_grid(0.095, 1.0, 512);
    let g = fit_objective(&[golden.alpha1, golden.alpha2], &grid, Objective::SumOfSquares).unwrap();
    assert!(v["objective_value"].as_f64().unwrap() <= g);
}

#[test]
fn fit_one_phase_absolute_reaches_optimal_profile() {
    let o = run(&[
        "fit",
        "--k",
        "1",
        "--objective",
        "absolute",
        "--grid",
        "0:1:512",
        "--midpoint",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let minima = v["local_minima"].as_array().unwrap();
    assert_eq!(minima.len(), 1);
    let p = minima[0][1].as_f64().unwrap();
    assert!((p - 25.0 / 27.0).abs() <= 1e-6, "{p}");
}

#[test]
fn fit_rejects_zero_k() {
    assert_eq!(run(&["fit", "--k", "0"]).status.code(), Some(1));
}

#[test]
fn verify_examples() {
    let o = run(&[
        "verify",
        "--n",
        "2",
        "--marked",
        "1",
        "--alphas",
        "3.141592653589793",
        "--betas",
        "3.141592653589793",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["max_gap"].as_f64().unwrap() <= 1e-12);
    assert!((v["full_probabilities"][0].as_f64().unwrap() - 1.0).abs() <= 1e-12);

    let o = run(&["verify", "--n", "15", "--marked", "1", "--alphas", "3.14"]);
    assert_ne!(o.status.code(), Some(0));

    let o = run(&["verify", "--n", "8", "--marked", "37", "--k", "6", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["max_gap"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["schedule"]["alphas"].as_array().unwrap().len(), 6);

    let o = run(&["verify", "--n", "3", "--marked", "0,5", "--alphas", "1.0,2.0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["marked"], 2);
}

#[test]
fn solve2_examples() {
    let o = run(&["solve2", "--roots", "0.4,0.8"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let first = &v["solutions"][0];
    assert!((first["alpha1"].as_f64().unwrap() - 1.00889485).abs() < 1e-6);
    assert!((first["alpha2"].as_f64().unwrap() - 2.30794928).abs() < 1e-6);

    assert_eq!(run(&["solve2", "--roots", "0.001,0.002"]).status.code(), Some(2));
    assert_eq!(run(&["solve2"]).status.code(), Some(1));

    let o = run(&["solve2", "--surface", "5"]);
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["alpha1", "alpha2", "discriminant"]);
    assert_eq!(rows.len(), 25);
}

#[test]
fn iterate_reports_roots_and_counts() {
    let o = run(&["iterate", "--k", "6", "--lambda", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["unity_roots"].as_array().unwrap().len(), 6);
    assert!((v["min_lambda_estimate"].as_f64().unwrap() - 0.01714).abs() < 1e-5);
    assert_eq!(v["grover"]["optimal_iterations"], 7);
    assert_eq!(run(&["iterate", "--k", "3", "--alpha", "0"]).status.code(), Some(2));
}

#[test]
fn envelope_and_classical_tables() {
    let o = run(&["envelope", "--alphas", "0,3.141592653589793", "--grid", "0:1:3"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "lambda,Pmin[0],Pmin[3.14159265359]");
    assert_eq!(lines.next().unwrap(), "0,0,0");
    assert_eq!(lines.next().unwrap(), "0.5,0.5,0");

    let o = run(&["classical", "--total", "4", "--marked", "2", "--k", "2"]);
    assert_eq!(
        stdout(&o),
        "k,exact,approximation,exhausted\n1,0.5,0.5,false\n2,0.833333333333,0.75,false\n"
    );
    assert_eq!(
        run(&["classical", "--total", "4", "--marked", "5", "--k", "2"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn equivalence_command() {
    let o = run(&["equiv", "--samples", "200", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["cases"], 200);
    assert!(v["max_probability_gap"].as_f64().unwrap() <= 1e-12);
    let o = run(&["equiv", "--alphas", "1.2", "--betas", "-0.7", "--lambda", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn help_and_unknown_commands() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["profile", "--alphas", "x"]).status.code(), Some(1));
}

#[test]
fn writes_fail_cleanly() {
    let o = run(&["profile", "--alphas", "1.0", "--out", "/nonexistent/dir/p.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!Path::new("/nonexistent/dir/p.csv").exists());
}
