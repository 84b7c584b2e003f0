use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "0")
        .output()
        .expect("binary runs")
}

fn json_of(args: &[&str]) -> Value {
    let out = qwalk(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn column(report: &Value, name: &str) -> usize {
    report["columns"].as_array().unwrap().iter().position(|c| c == name).unwrap()
}

fn rows(report: &Value) -> &Vec<Value> {
    report["rows"].as_array().unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn dispersion_rows_and_gap_edges() {
    let r = json_of(&["dispersion", "--theta", "0.25", "--k-points", "5"]);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(rows(&r).len(), 5);
    let (k, e) = (column(&r, "k"), column(&r, "E_plus"));
    let at_zero = rows(&r).iter().find(|row| f(&row[k]).abs() < 1e-15).unwrap();
    assert!((f(&at_zero[e]) - PI / 4.0).abs() < 1e-15);

    // θ = 0 closes the gap at k = 0 and at both zone edges
    let r = json_of(&["dispersion", "--theta", "0", "--k-points", "5"]);
    let nx = column(&r, "n_x");
    let at_zero = rows(&r).iter().find(|row| f(&row[k]).abs() < 1e-15).unwrap();
    assert!(at_zero[nx].is_null());
    assert_eq!(r["summary"]["gap_closing_rows"], 3);
}

#[test]
fn winding_sweep() {
    let r = json_of(&["winding", "--theta-min", "-0.9", "--theta-max", "0.9", "--steps", "19"]);
    let (t, m, integral) = (column(&r, "theta"), column(&r, "m"), column(&r, "integral_value"));
    assert_eq!(rows(&r).len(), 19);
    for row in rows(&r) {
        let theta = f(&row[t]);
        if theta == 0.0 {
            assert!(row[m].is_null());
            assert_eq!(row[column(&r, "reason")], "gap-closed");
        } else {
            let expected = theta.signum();
            assert_eq!(f(&row[m]), expected);
            assert!((f(&row[integral]) - expected).abs() < 1e-6);
        }
    }
    let r = json_of(&["winding", "--theta-min", "0.25", "--theta-max", "0.25", "--steps", "1"]);
    assert_eq!(rows(&r).len(), 1);
    assert_eq!(rows(&r)[0][m], 1);
}

#[test]
fn bound_single_reports_mode_or_verdict() {
    let r = json_of(&["bound-single", "--theta1", "0.25", "--theta2", "-0.25", "--energy", "0"]);
    assert_eq!(r["summary"]["exists"], true);
    let mode = &r["summary"]["modes"][0];
    assert!(f(&mode["residual"]) < 1e-10);
    let (n, p) = (column(&r, "n"), column(&r, "probability"));
    let peak = rows(&r).iter().max_by(|a, b| f(&a[p]).total_cmp(&f(&b[p]))).unwrap();
    assert!((0..=1).contains(&peak[n].as_i64().unwrap()));

    let out = qwalk(&["bound-single", "--theta1", "0.25", "--theta2", "0.3333333333"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["summary"]["reason"], "same-sign-no-bound-state");
    assert!(rows(&r).is_empty());
}

#[test]
fn wire_spectrum_matches_reference_table() {
    let table = [
        (1, [2.13e-2, 4.68e-2, 8.04e-2]),
        (5, [1.09e-4, 1.33e-3, 7.89e-3]),
        (10, [1.51e-7, 1.62e-5, 5.04e-4]),
    ];
    let r = json_of(&["wire-spectrum"]);
    assert_eq!(rows(&r).len(), 10);
    for (n, expected) in table {
        let row = &rows(&r)[n - 1];
        assert_eq!(row[0], n);
        for (c, e) in expected.iter().enumerate() {
            assert!((f(&row[c + 1]) / e - 1.0).abs() < 5e-3, "N={n} col={c}");
        }
    }
    for fit in r["summary"]["decay_fits"].as_array().unwrap() {
        assert!(f(&fit["relative_deviation"]) < 0.02);
    }
}

#[test]
fn jobs_do_not_change_results() {
    let one = qwalk(&["wire-spectrum", "--jobs", "1", "--n-max", "12"]);
    let four = qwalk(&["wire-spectrum", "--jobs", "4", "--n-max", "12"]);
    assert!(one.status.success() && four.status.success());
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["metadata"]["parameters"] = Value::Null;
        v
    };
    assert_eq!(strip(&one), strip(&four));
}

#[test]
fn evolve_conserves_norm_and_stationary_modes() {
    let r = json_of(&["evolve", "--theta", "0.25", "--n-sites", "256", "--steps", "100"]);
    assert!(f(&r["summary"]["norm_drift"]) < 1e-10);
    assert!(f(&r["summary"]["final_std_n"]) > 20.0);

    let r = json_of(&[
        "evolve",
        "--profile",
        "single",
        "--theta1",
        "0.3",
        "--theta2",
        "-0.2",
        "--n-sites",
        "128",
        "--init",
        "bound:pi",
        "--steps",
        "40",
        "--snapshot-every",
        "10",
    ]);
    assert!(f(&r["summary"]["max_distribution_change"]) < 1e-9);
    assert_eq!(rows(&r).len(), 5 * 128);

    let r = json_of(&["evolve", "--init", "delta:3:a", "--steps", "0", "--n-sites", "16"]);
    let p = column(&r, "probability");
    assert_eq!(rows(&r).len(), 16);
    assert_eq!(f(&rows(&r)[3][p]), 1.0);
}

#[test]
fn evolve_random_start_is_seeded() {
    let a = qwalk(&["evolve", "--init", "random", "--seed", "7", "--steps", "5"]);
    let b = qwalk(&["evolve", "--init", "random", "--seed", "7", "--steps", "5"]);
    let c = qwalk(&["evolve", "--init", "random", "--seed", "8", "--steps", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn diagonalize_flags_localized_states() {
    let sym = json_of(&[
        "diagonalize",
        "--profile",
        "wire",
        "--theta1",
        "0.5",
        "--theta2",
        "-0.25",
        "--n-sites",
        "64",
        "--wire-length",
        "10",
    ]);
    assert_eq!(sym["summary"]["near_zero"].as_array().unwrap().len(), 2);
    assert_eq!(sym["summary"]["near_pi"].as_array().unwrap().len(), 2);
    for s in sym["summary"]["near_zero"].as_array().unwrap() {
        assert!(f(&s["E"]).abs() > 1e-9);
    }

    let anti = json_of(&[
        "diagonalize",
        "--profile",
        "antisymmetric",
        "--theta1",
        "0.5",
        "--theta2",
        "-0.25",
        "--n-sites",
        "64",
        "--wire-length",
        "10",
    ]);
    for s in anti["summary"]["near_zero"].as_array().unwrap() {
        assert!(f(&s["E"]).abs() < 1e-8);
        // at the π/2 end of the wire or where −π/2 meets π/2 across the seam
        let n = s["peak_n"].as_i64().unwrap();
        assert!(n == 0 || n == -16, "peak at {n}");
    }

    let uniform = json_of(&["diagonalize", "--theta", "0.3", "--n-sites", "40"]);
    assert_eq!(uniform["summary"]["flagged"], 0);
    assert_eq!(rows(&uniform).len(), 80);
}

#[test]
fn csv_matches_json() {
    let args = ["dispersion", "--theta", "0.37", "--k-points", "9"];
    let json = json_of(&args);
    let out = qwalk(&[&args[..], &["--format", "csv"]].concat());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# schema_version: 1\n# metadata: "));
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    let json_cols: Vec<String> =
        json["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect();
    assert_eq!(header, json_cols);
    let csv_rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(csv_rows.len(), rows(&json).len());
    for (c, j) in csv_rows.iter().zip(rows(&json)) {
        for (a, b) in c.iter().zip(j.as_array().unwrap()) {
            assert_eq!(a.parse::<f64>().unwrap(), f(b));
        }
    }
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let out = qwalk(&["winding", "--steps", "3", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn usage_errors_exit_with_2() {
    for args in [
        &["diagonalize", "--n-sites", "513"][..],
        &["dispersion", "--theta", "0.25", "--k-points", "1"],
        &["evolve", "--init", "delta:x"],
        &["evolve", "--profile", "wire", "--theta1", "0.3"],
        &["evolve", "--profile", "zigzag"],
        &["winding", "--steps", "0"],
        &["bogus-command"],
        &["wire-spectrum", "--jobs", "0"],
    ] {
        assert_eq!(qwalk(args).status.code(), Some(2), "{args:?}");
    }
}
