//! The `topos-measure` command line: argument parsing, dispatch and reports.

pub mod commands;
pub mod config;

use crate::report::{sort_checks, Check, Status};
use clap::{Args, Parser, Subcommand};
use config::ConfigError;
use serde_json::{json, Map, Value};
use std::path::PathBuf;
use std::time::Instant;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "topos-measure", version, about = "Verify invariant measures and modular flows on finite groupoid actions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Model configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = "TOPOS_MEASURE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = crate::tolerance::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Sample times `a:b:step`.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_t_grid)]
    pub t_grid: Option<TGrid>,
    #[arg(long, global = true, conflicts_with = "text")]
    pub json: bool,
    #[arg(long, global = true)]
    pub text: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TGrid(pub Vec<f64>);

/// `a:b:step` denotes `a, a + step, …` up to `b` inclusive.
pub fn parse_t_grid(s: &str) -> Result<TGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, step] = parts[..] else {
        return Err(format!("expected a:b:step, got `{s}`"));
    };
    let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}"));
    let (a, b, step) = (num(a)?, num(b)?, num(step)?);
    if !(a.is_finite() && b.is_finite() && step.is_finite()) || step <= 0.0 || b < a {
        return Err("need finite a <= b and step > 0".into());
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    if n > 100_000 {
        return Err("grid has more than 100000 points".into());
    }
    Ok(TGrid((0..=n).map(|k| a + k as f64 * step).collect()))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that the configuration is a valid model.
    Validate,
    /// Orbits, stabilizers and internal cardinals of every action.
    Orbits(commands::OrbitsArgs),
    /// Invariant-measure axioms on all configured objects and maps.
    MeasureCheck(commands::MeasureCheckArgs),
    /// Change of variables along a finite map.
    ChangeOfVars(commands::ChangeOfVarsArgs),
    /// Extend a class measure to an object along epimorphic covers.
    Extend(commands::ExtendArgs),
    /// Descend a section of the modular bundle along an epimorphism.
    Glue(commands::GlueArgs),
    /// Sections of the modular bundle over an object versus slice measures.
    Chi(commands::ChiArgs),
    /// Radon–Nikodym derivative of two valuations.
    Rn(commands::RnArgs),
    /// The modular flow on an operator.
    ModularFlow(commands::ModularFlowArgs),
    /// KMS boundary identities for a pair of operators.
    Kms(commands::KmsArgs),
    /// Trace property of the weight of a section.
    Trace(commands::TraceArgs),
    /// Vector state of a measure and back.
    State(commands::StateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Orbits(_) => "orbits",
            Command::MeasureCheck(_) => "measure-check",
            Command::ChangeOfVars(_) => "change-of-vars",
            Command::Extend(_) => "extend",
            Command::Glue(_) => "glue",
            Command::Chi(_) => "chi",
            Command::Rn(_) => "rn",
            Command::ModularFlow(_) => "modular-flow",
            Command::Kms(_) => "kms",
            Command::Trace(_) => "trace",
            Command::State(_) => "state",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// What a command produces before the report envelope is added.
#[derive(Debug, Default)]
pub struct Outcome {
    pub inputs: Map<String, Value>,
    pub checks: Vec<Check>,
    pub outputs: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub checks: Vec<Check>,
    pub outputs: Value,
    pub seed: u64,
    pub status: Status,
    pub wall_time_ms: u64,
}

impl Report {
    /// Keys are emitted sorted.
    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "checks": self.checks,
            "outputs": self.outputs,
            "seed": self.seed,
            "status": self.status,
            "wall_time_ms": self.wall_time_ms,
        })
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("report is serializable")
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("{} (seed {}): {}\n", self.command, self.seed, status_word(self.status));
        for c in &self.checks {
            out.push_str(&format!("  {:<4} {}", status_word(c.status), c.name));
            if let Some(d) = c.deviation {
                out.push_str(&format!("  deviation {d:e}"));
            }
            if let Some(w) = &c.witness {
                out.push_str(&format!("  [{w}]"));
            }
            out.push('\n');
        }
        out
    }

    pub fn exit_code(&self) -> i32 {
        if self.status == Status::Fail {
            EXIT_FAIL
        } else {
            EXIT_PASS
        }
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::NotApplicable => "n/a",
    }
}

/// n/a entries never fail a report.
pub fn overall_status(checks: &[Check]) -> Status {
    if checks.iter().any(Check::is_fail) {
        Status::Fail
    } else {
        Status::Pass
    }
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut outcome = commands::dispatch(&cli.command, &cli.global)?;
    sort_checks(&mut outcome.checks);
    outcome
        .inputs
        .insert("tolerance".into(), json!(cli.global.tolerance));
    if let Some(path) = &cli.global.config {
        outcome.inputs.insert("config".into(), json!(path.display().to_string()));
    }
    if let Some(TGrid(ts)) = &cli.global.t_grid {
        outcome.inputs.insert("t_grid".into(), json!(ts));
    }
    Ok(Report {
        command: cli.command.name().to_string(),
        inputs: Value::Object(outcome.inputs),
        status: overall_status(&outcome.checks),
        checks: outcome.checks,
        outputs: Value::Object(outcome.outputs),
        seed: cli.global.seed,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

/// Full binary behaviour; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(report) => {
            if cli.global.text {
                print!("{}", report.render_text());
            } else {
                println!("{}", report.render_json());
            }
            report.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
