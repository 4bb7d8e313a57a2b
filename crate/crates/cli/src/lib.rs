//! Command-line front end: `eval`, `verify`, `extend` and `category`.
//!
//! Every subcommand reads one JSON document (`--input <path|->`, or inline
//! JSON when the argument starts with `{`), prints a report, and exits with
//! 0 on success, 1 when a verification check fails, and 2 on bad input.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use completion_core::Rational;
use serde_json::Value;

mod category;
mod eval;
mod extend;
mod verify;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 1729;
pub const DEFAULT_PRECISION_CAP: u32 = 64;
pub const DEFAULT_SAMPLE_CAP: usize = 10_000;

#[derive(Debug, Parser)]
#[command(name = "completion", version, about = "Metric completions by regular Cauchy sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    /// Descriptor file, `-` for stdin, or inline JSON.
    #[arg(long, global = true)]
    pub input: Option<String>,
    /// Precision k: results are certified to within 2^-k.
    #[arg(long, global = true, default_value_t = 16)]
    pub precision: u32,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Number of sampled points or triples.
    #[arg(long, global = true, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION_CAP)]
    pub precision_cap: u32,
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLE_CAP)]
    pub sample_cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Approximate a described point by a base element.
    Eval,
    /// Run the metric, regularity, density, isometry and diagram suites.
    Verify,
    /// Extend an isometry to the completion and check the diagram commutes.
    Extend,
    /// Check category axioms, rigidity and search for P-tions.
    Category,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Failure = 1,
    InputError = 2,
}

#[derive(Debug)]
pub struct Outcome {
    pub exit: Exit,
    pub stdout: String,
    pub stderr: String,
}

/// An input problem; always exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

/// A finished command: its verdict and report in both renderings.
pub(crate) struct Report {
    pub passed: bool,
    pub json: Value,
    pub text: String,
}

pub fn run(cli: &Cli, stdin: impl Read) -> Outcome {
    match execute(cli, stdin) {
        Ok(report) => {
            let mut stdout = match cli.opts.format {
                Format::Json => serde_json::to_string_pretty(&report.json).expect("reports serialize"),
                Format::Text => report.text,
            };
            if !stdout.ends_with('\n') {
                stdout.push('\n');
            }
            Outcome {
                exit: if report.passed { Exit::Success } else { Exit::Failure },
                stdout,
                stderr: String::new(),
            }
        }
        Err(InputError(msg)) => Outcome {
            exit: Exit::InputError,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

fn execute(cli: &Cli, stdin: impl Read) -> Result<Report, InputError> {
    let opts = &cli.opts;
    if opts.precision > opts.precision_cap {
        return Err(InputError(format!(
            "precision {} exceeds the cap {} (raise it with --precision-cap)",
            opts.precision, opts.precision_cap
        )));
    }
    if opts.samples > opts.sample_cap {
        return Err(InputError(format!(
            "samples {} exceeds the cap {} (raise it with --sample-cap)",
            opts.samples, opts.sample_cap
        )));
    }
    let input = read_input(opts.input.as_deref(), stdin)?;
    match cli.command {
        Command::Eval => eval::run(opts, &input),
        Command::Verify => verify::run(opts, &input),
        Command::Extend => extend::run(opts, &input),
        Command::Category => category::run(opts, &input),
    }
}

fn read_input(arg: Option<&str>, mut stdin: impl Read) -> Result<Value, InputError> {
    let arg = arg.ok_or_else(|| InputError("--input is required".into()))?;
    let raw = if arg == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s)?;
        s
    } else if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg)).map_err(|e| InputError(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&raw).map_err(|e| InputError(format!("invalid JSON: {e}")))
}

pub(crate) fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value, InputError> {
    v.get(name)
        .ok_or_else(|| InputError(format!("missing field {name:?}")))
}

pub(crate) fn pow2_neg_json(k: u32) -> Value {
    Value::String(Rational::pow2_neg(k).to_string())
}

pub(crate) fn status_word(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

/// `name: PASS` / `name: FAIL (detail)` lines.
pub(crate) fn push_line(text: &mut String, name: &str, passed: bool, detail: &str) {
    let _ = write!(text, "{name}: {}", status_word(passed));
    if !detail.is_empty() {
        let _ = write!(text, " ({detail})");
    }
    text.push('\n');
}
