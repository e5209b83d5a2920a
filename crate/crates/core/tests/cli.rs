use std::f64::consts::{FRAC_PI_2, PI};
use std::process::Command;

use obtuse::cli::run_with_args;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("obtuse").chain(args.iter().copied());
    let code = run_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

const HYP: &str = r#"{"type":"hyperboloid","a":1.0}"#;

#[test]
fn growth_on_hyperboloid() {
    let v = json(&["growth", "--space", HYP]);
    let s = 2f64.sqrt();
    assert!((v["v_inf"].as_f64().unwrap() - PI / s).abs() < 1e-4);
    assert!((v["ideal_boundary_length"].as_f64().unwrap() - 2.0 * PI / s).abs() < 1e-4);
    assert!((v["total_curvature"].as_f64().unwrap() - 2.0 * PI * (1.0 - 1.0 / s)).abs() < 1e-4);
    for key in ["command", "spec", "seed", "value", "ladder", "uncertainty", "convention_notes", "wall_time"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["convention_notes"].as_str().unwrap().contains("pi/2"));
}

#[test]
fn constants_example() {
    let v = json(&["constants", "--n", "2", "--D", "1", "--rmin", "0.5", "--v1", "0.1"]);
    let c1 = 1f64.cosh() - 0.25f64.cosh();
    assert!((v["c1"].as_f64().unwrap() - c1).abs() < 1e-9);
    assert!((c1 - 0.51166).abs() < 1e-5);
    let eps = v["eps"].as_f64().unwrap();
    assert!(eps > 0.0 && eps <= FRAC_PI_2);
}

#[test]
fn plane_obtuse_from_infinity_is_right_angle() {
    let v = json(&["obtuse-inf", "--space", r#"{"type":"plane"}"#, "--pairs", "3", "--rfar", "100,1000"]);
    assert!((v["value"].as_f64().unwrap() - FRAC_PI_2).abs() < 1e-9);
    assert!(v["uncertainty"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["ladder"].as_array().unwrap().len(), 3);
}

#[test]
fn output_is_byte_identical() {
    let args = ["kappa-obtuse", "--space", r#"{"type":"flat_cone","length":2.0}"#, "--pairs", "5", "--seed", "9"];
    let (c1, a, _) = run(&args);
    let (c2, b, _) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
}

#[test]
fn twelve_significant_digits() {
    let (_, out, _) = run(&["dist", "--space", r#"{"type":"plane"}"#, "--p", "1,0", "--q", "1,1"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let d = v["value"].as_f64().unwrap();
    // the chord 2 sin(1/2), found by shooting
    assert!((d - 2.0 * 0.5f64.sin()).abs() < 1e-9);
    let text = out.lines().find(|l| l.contains("\"value\"")).unwrap();
    let digits = text.chars().filter(|c| c.is_ascii_digit()).count() - 1;
    assert!(digits <= 12, "{text}");
    assert_eq!(format!("{:.11e}", d).parse::<f64>().unwrap(), d);
}

#[test]
fn csv_has_header_and_stable_columns() {
    let (code, out, _) = run(&["growth", "--space", r#"{"type":"flat_cone","length":3.0}"#, "--out", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("command,spec,seed,value,ladder,uncertainty,convention_notes,wall_time,"));
    assert!(lines[1].starts_with("growth,"));
}

#[test]
fn exit_codes() {
    let (code, _, err) = run(&["growth", "--space", r#"{"type":"flat_cone","length":7.0}"#]);
    assert_eq!(code, 2);
    assert!(err.contains("length"));
    let (code, _, _) = run(&["growth", "--space", "{\"type\":"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["obtuse-compact", "--space", HYP]);
    assert_eq!(code, 3);
    let (code, _, _) = run(&["geodesic", "--space", r#"{"type":"flat_cone","length":1.0}"#, "--p", "1,0"]);
    assert_eq!(code, 3);
    let (code, _, _) = run(&["dist", "--space", HYP, "--p", "1,0"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["obtuse-inf", "--space", HYP, "--rfar", "100,10"]);
    assert_eq!(code, 2);
}

#[test]
fn convention_notes_switch() {
    let v = json(&["totcurv", "--space", r#"{"type":"flat_cone","length":3.0}"#, "--convention-notes", "off"]);
    assert!(v["convention_notes"].is_null());
    assert!((v["value"].as_f64().unwrap() - (2.0 * PI - 3.0)).abs() < 1e-12);
}

#[test]
fn geodesic_and_angle_commands() {
    let v = json(&["geodesic", "--space", HYP, "--p", "2,0", "--direction", "1.0", "--length", "20"]);
    assert!(v["clairaut_drift"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["path"].as_array().unwrap().len(), 17);
    let v = json(&["angle", "--space", r#"{"type":"plane"}"#, "--p", "0,0", "--q", "1,0", "--x", "1,1.5"]);
    assert!((v["value"].as_f64().unwrap() - 1.5).abs() < 1e-9);
    assert!((v["comparison_angle"].as_f64().unwrap() - 1.5).abs() < 1e-9);
    let v = json(&["angle", "--space", r#"{"type":"hyperbolic_ideal_triangle"}"#, "--p", "0.5,1", "--q", "0.5,2",
                   "--x", "0.2,1", "--kappa", "-1"]);
    assert!(v["value"].as_f64().unwrap() >= v["comparison_angle"].as_f64().unwrap() - 1e-9);
}

#[test]
fn binary_reports_exit_code() {
    let status = Command::new(env!("CARGO_BIN_EXE_obtuse"))
        .args(["obtuse-compact", "--space", HYP])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(3));
    let ok = Command::new(env!("CARGO_BIN_EXE_obtuse"))
        .args(["growth", "--space", r#"{"type":"plane"}"#])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
}
