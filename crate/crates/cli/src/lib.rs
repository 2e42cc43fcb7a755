//! Front end for the `cpn-certify` binary: argument parsing, the verbs and
//! the JSON report.

pub mod config;
pub mod json;
pub mod report;
pub mod suites;

use clap::{Parser, Subcommand};

use config::{Flags, RunConfig, UsageError};
use report::Report;

#[derive(Parser, Debug)]
#[command(
    name = "cpn-certify",
    version,
    about = "Checks for the Fubini-Study metric on CP^N and its entropy variations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Curvature, Einstein constant and chart transitions.
    Geometry(Flags),
    /// First eigenspace of the Laplacian.
    Eigen(Flags),
    /// Sphere moments of the special eigenfunction.
    Moments(Flags),
    /// Closed-form variation formulas against finite differences.
    Variation(Flags),
    /// Symbolic reduction of the third variation.
    Algebra(Flags),
    /// Full stability certificate.
    Certify(Flags),
}

impl Verb {
    fn parts(&self) -> (&'static str, &Flags) {
        match self {
            Verb::Geometry(f) => ("geometry", f),
            Verb::Eigen(f) => ("eigen", f),
            Verb::Moments(f) => ("moments", f),
            Verb::Variation(f) => ("variation", f),
            Verb::Algebra(f) => ("algebra", f),
            Verb::Certify(f) => ("certify", f),
        }
    }
}

/// Result of one invocation: exit code, report text (empty on usage
/// errors) and lines for stderr.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
    pub messages: Vec<String>,
    pub output_path: Option<String>,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn usage_outcome(e: UsageError) -> Outcome {
    Outcome {
        code: EXIT_USAGE,
        report: String::new(),
        messages: vec![format!("usage error: {e}")],
        output_path: None,
    }
}

/// Builds the report for `verb` under `cfg`. `cfg` must be validated.
pub fn run_verb(verb: &str, cfg: &RunConfig) -> Report {
    match verb {
        "geometry" => suites::geometry(cfg),
        "eigen" => suites::eigen(cfg),
        "moments" => suites::moments(cfg),
        "variation" => suites::variation(cfg),
        "algebra" => suites::algebra(cfg),
        "certify" => suites::certify_cmd(cfg),
        other => unreachable!("unknown verb {other}"),
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let (verb, flags) = cli.verb.parts();
    let cfg = match RunConfig::resolve(flags) {
        Ok(c) => c,
        Err(e) => return usage_outcome(e),
    };
    if let Err(e) = cfg.validate(verb == "moments") {
        return usage_outcome(e);
    }
    let rep = run_verb(verb, &cfg);
    let messages = rep
        .failures()
        .map(|r| {
            let detail = r.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default();
            format!("FAIL {}: {}{detail}", r.name, r.anchor)
        })
        .collect();
    let code = if rep.status() == report::Status::Pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    };
    Outcome {
        code,
        report: rep.to_text(),
        messages,
        output_path: cfg.output_path.clone(),
    }
}

/// Parses `args` (including the program name) and runs. Parse failures,
/// `--help` and `--version` come back as usage outcomes with clap's text.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            Outcome {
                code,
                report: String::new(),
                messages: vec![e.render().to_string()],
                output_path: None,
            }
        }
    }
}
