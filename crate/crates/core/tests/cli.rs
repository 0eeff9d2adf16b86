mod common;

use common::{check_golden, run, strip_wall_time, GOLDEN_CASES};
use serde_json::Value;

fn report(args: &[&str]) -> (i32, Value) {
    let r = run(args);
    assert!(!r.stdout.is_empty(), "no report: {}", r.stderr);
    (r.code, serde_json::from_str(&r.stdout).expect("report is JSON"))
}

fn check<'a>(rep: &'a Value, name: &str) -> &'a Value {
    rep["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check `{name}`"))
}

#[test]
fn minimal_config_validates() {
    let (code, rep) = report(&["--config", "minimal.json", "validate"]);
    assert_eq!(code, 0);
    assert_eq!(rep["status"], "pass");
    assert_eq!(rep["command"], "validate");
}

#[test]
fn z2_fixture_has_two_orbits_on_x() {
    let (code, rep) = report(&["--config", "z2_swap.json", "validate"]);
    assert_eq!(code, 0);
    assert_eq!(rep["outputs"]["orbits"]["X"], 2);
    let (_, rep) = report(&["--config", "z2_swap.json", "orbits", "--action", "X"]);
    assert_eq!(rep["outputs"]["X"]["orbits"], serde_json::json!([["a", "b"], ["c"]]));
    assert_eq!(rep["outputs"]["X"]["stabilizers"]["a"], 1);
    assert_eq!(rep["outputs"]["X"]["stabilizers"]["c"], 2);
    assert_eq!(rep["outputs"]["X"]["internal_cardinal"]["o"], 3);
}

#[test]
fn dangling_endpoint_is_reported_with_its_path() {
    let (code, rep) = report(&["--config", "dangling.json", "validate"]);
    assert_eq!(code, 1);
    let w = check(&rep, "config:valid")["witness"].as_str().unwrap();
    assert!(w.contains("/groupoid/morphisms/1"), "{w}");
    // other commands refuse to run on an invalid model
    let r = run(&["--config", "dangling.json", "orbits"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("/groupoid/morphisms/1"));
}

#[test]
fn kms_fixture_passes_within_tolerance() {
    let (code, rep) = report(&["--config", "kms.json", "kms", "--u", "u.json", "--v", "v.json", "--t-grid", "-2:2:0.5"]);
    assert_eq!(code, 0);
    for name in ["kms:boundary[t]", "kms:boundary[t-i]"] {
        let c = check(&rep, name);
        assert_eq!(c["status"], "pass");
        assert!(c["deviation"].as_f64().unwrap() < 1e-9);
    }
    assert_eq!(rep["outputs"]["points"].as_array().unwrap().len(), 9);
    let at = |k: &str| rep["outputs"][k].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect::<Vec<_>>();
    let f0 = at("f_at_0");
    let fi = at("f_at_minus_i");
    assert!((f0[0] - 1.0).abs() < 1e-12 && f0[1].abs() < 1e-12);
    assert!((fi[0] - 2.0).abs() < 1e-12 && fi[1].abs() < 1e-12);
}

#[test]
fn operators_resolve_by_name_too() {
    let (code, _) = report(&["--config", "kms.json", "kms", "--u", "E12", "--v", "E21"]);
    assert_eq!(code, 0);
}

#[test]
fn rn_density() {
    let (code, rep) = report(&["--config", "rn.json", "rn", "--mu", "mu", "--nu", "nu", "--object", "X"]);
    assert_eq!(code, 0);
    assert_eq!(rep["outputs"]["density"], serde_json::json!({"x": 2.0, "y": 3.0}));
}

#[test]
fn failing_checks_exit_one_and_na_does_not() {
    let r = run(&["--config", "z2_swap.json", "glue", "--map", "fold", "--section", "uneven"]);
    assert_eq!(r.code, 1);
    // measure-check carries n/a entries yet passes
    let (code, rep) = report(&["--config", "z2_swap.json", "measure-check"]);
    assert_eq!(code, 0);
    assert_eq!(check(&rep, "unit/IM3[n=∞]")["status"], "n/a");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["--config", "z2_swap.json", "orbits", "--frobnicate"]).code, 2);
    assert_eq!(run(&["--config", "z2_swap.json", "teleport"]).code, 2);
    assert_eq!(run(&["validate"]).code, 2);
    assert_eq!(run(&["--config", "z2_swap.json", "glue", "--map", "nope", "--section", "mGG"]).code, 2);
    assert_eq!(run(&["--config", "z2_swap.json", "kms", "--u", "hop", "--v", "hop_back", "--t-grid", "1:0:1"]).code, 2);
}

#[test]
fn reports_embed_the_seed_and_honor_the_environment() {
    let (_, rep) = report(&["--seed", "42", "--config", "minimal.json", "validate"]);
    assert_eq!(rep["seed"], 42);
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_topos-measure"))
        .args(["--config", "minimal.json", "validate"])
        .current_dir(common::fixtures())
        .env("TOPOS_MEASURE_SEED", "99")
        .output()
        .unwrap();
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["seed"], 99);
}

#[test]
fn seeded_commands_are_deterministic_and_seed_sensitive() {
    let args = |seed: &'static str| ["--seed", seed, "--config", "z2_swap.json", "change-of-vars", "--map", "fold"];
    let a = strip_wall_time(&run(&args("3")).stdout);
    let b = strip_wall_time(&run(&args("3")).stdout);
    let c = strip_wall_time(&run(&args("4")).stdout);
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn text_output() {
    let r = run(&["--text", "--config", "z2_swap.json", "trace", "--section", "skew"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("trace (seed 0): pass"));
    assert!(r.stdout.contains("pair (a, c)"));
}

#[test]
fn golden_reports() {
    let failures: Vec<String> = GOLDEN_CASES.iter().filter_map(|(n, a)| check_golden(n, a).err()).collect();
    assert!(failures.is_empty(), "{failures:#?}");
}
