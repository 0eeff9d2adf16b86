//! Helpers shared by the CLI integration tests and the acceptance runner.

#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the binary inside `fixtures/` so paths in reports stay relative.
pub fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_topos-measure"))
        .args(args)
        .current_dir(fixtures())
        .env_remove("TOPOS_MEASURE_SEED")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8"),
        stderr: String::from_utf8(out.stderr).expect("utf-8"),
    }
}

/// The report with its timing line zeroed.
pub fn strip_wall_time(report: &str) -> String {
    report
        .lines()
        .map(|l| {
            if l.starts_with("  \"wall_time_ms\": ") {
                "  \"wall_time_ms\": 0"
            } else {
                l
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

/// `(golden file, arguments)`; every case runs with seed 7.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    ("validate_minimal", &["--config", "minimal.json", "validate"]),
    ("orbits_z2", &["--config", "z2_swap.json", "orbits"]),
    ("measure_check_z2", &["--config", "z2_swap.json", "measure-check"]),
    ("change_of_vars_fold", &["--config", "z2_swap.json", "change-of-vars", "--map", "fold"]),
    ("extend_pt", &["--config", "z2_swap.json", "extend", "--object", "pt", "--class", "mG,mGG"]),
    ("glue_fold", &["--config", "z2_swap.json", "glue", "--map", "fold", "--section", "mGG"]),
    ("glue_uneven", &["--config", "z2_swap.json", "glue", "--map", "fold", "--section", "uneven"]),
    ("chi_x", &["--config", "z2_swap.json", "chi", "--object", "X", "--section", "mX"]),
    ("rn", &["--config", "rn.json", "rn", "--mu", "mu", "--nu", "nu", "--object", "X"]),
    ("modular_flow_hop", &["--config", "z2_swap.json", "modular-flow", "--operator", "hop", "--section", "skew"]),
    ("kms_fixture", &["--config", "kms.json", "kms", "--u", "u.json", "--v", "v.json", "--t-grid", "-2:2:0.5"]),
    ("trace_skew", &["--config", "z2_swap.json", "trace", "--section", "skew"]),
    ("trace_constant", &["--config", "z2_swap.json", "trace", "--section", "mX"]),
    ("state_mx", &["--config", "z2_swap.json", "state", "--measure", "mX", "--normalize"]),
];

pub fn golden_args<'a>(args: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["--seed", "7"];
    v.extend_from_slice(args);
    v
}

pub fn golden_path(name: &str) -> PathBuf {
    fixtures().join("golden").join(format!("{name}.json"))
}

/// Compares a case against its golden file; `UPDATE_GOLDEN=1` rewrites it.
pub fn check_golden(name: &str, args: &[&str]) -> Result<(), String> {
    let r = run(&golden_args(args));
    if r.stdout.is_empty() {
        return Err(format!("{name}: no report (exit {}, stderr {})", r.code, r.stderr));
    }
    let got = strip_wall_time(&r.stdout);
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let want = std::fs::read_to_string(&path).map_err(|e| format!("{name}: {e}"))?;
    if got == want {
        Ok(())
    } else {
        Err(format!("{name}: report differs from {}", path.display()))
    }
}
