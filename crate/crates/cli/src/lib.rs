//! Command-line front end for `qconn`: instance files, analyses, DOT export and search.

pub mod commands;
pub mod instance;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use qconn::connectivity::search::DEFAULT_SEED;
use qconn::value::{parse_rational, Rational};

use commands::{AnalyzeOptions, Outcome, SearchArgs};

#[derive(Debug, Parser)]
#[command(name = "qconn", version, about = "Finite quasi-metric and bitopological connectedness toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an instance file; prints diagnostics as JSON.
    Validate {
        path: PathBuf,
        /// Compare distances with this absolute tolerance instead of exactly.
        #[arg(long)]
        float_tol: Option<f64>,
    },
    /// Run analyses on an instance and print one JSON report.
    Analyze {
        path: PathBuf,
        /// Symmetric and antisymmetric components (default when no analysis is named).
        #[arg(long)]
        components: bool,
        /// Local antisymmetric connectedness per point.
        #[arg(long)]
        local: bool,
        /// Components at scale ε; repeatable.
        #[arg(long = "scale", value_name = "EPS", value_parser = rational_arg, allow_hyphen_values = true)]
        scale: Vec<Rational>,
        /// Smyth completeness and join compactness.
        #[arg(long)]
        smyth: bool,
        /// Formal-ball poset over comma-separated radii.
        #[arg(long, value_name = "R1,R2,...", value_parser = rational_list_arg, allow_hyphen_values = true)]
        formal_balls: Option<RationalList>,
        /// Cover sizes at comma-separated thresholds.
        #[arg(long, value_name = "E1,E2,...", value_parser = rational_list_arg, allow_hyphen_values = true)]
        precompact: Option<RationalList>,
        /// Also write the components graph here.
        #[arg(long, value_name = "OUT")]
        dot: Option<PathBuf>,
        #[arg(long)]
        float_tol: Option<f64>,
        /// Write the report here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Search generated spaces for failures of a target property.
    Search {
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Cap on generated instances (default: all in exhaustive mode, 1000 in random mode).
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Include wall time in the findings file.
        #[arg(long)]
        record_time: bool,
    },
    /// Write a DOT graph of components, or of formal balls with --formal-balls.
    ExportDot {
        path: PathBuf,
        #[arg(long, value_name = "R1,R2,...", value_parser = rational_list_arg, allow_hyphen_values = true)]
        formal_balls: Option<RationalList>,
        #[arg(long)]
        float_tol: Option<f64>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s.trim()).map_err(|e| e.to_string())
}

/// A comma-separated list of rationals given as one argument.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalList(pub Vec<Rational>);

fn rational_list_arg(s: &str) -> Result<RationalList, String> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(rational_arg).collect::<Result<_, _>>().map(RationalList)
}

/// Worker count from `QCONN_THREADS`; unset or unparsable means every core.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("QCONN_THREADS").ok().and_then(|v| v.trim().parse().ok()).filter(|&t| t > 0)
}

pub fn execute(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { path, float_tol } => commands::cmd_validate(&path, float_tol),
        Command::Analyze { path, components, local, scale, smyth, formal_balls, precompact, dot, float_tol, output } => {
            let opts = AnalyzeOptions {
                components,
                local,
                scale,
                smyth,
                formal_balls: formal_balls.map(|r| r.0),
                precompact: precompact.map(|r| r.0),
                dot,
                float_tol,
                output,
            };
            commands::cmd_analyze(&path, &opts)
        }
        Command::Search { target, n, mode, seed, budget, output, record_time } => commands::cmd_search(&SearchArgs {
            target,
            mode,
            n,
            seed,
            budget,
            threads: threads_from_env(),
            output,
            record_time,
        }),
        Command::ExportDot { path, formal_balls, float_tol, output } => {
            commands::cmd_export_dot(&path, formal_balls.as_ref().map(|r| r.0.as_slice()), output.as_deref(), float_tol)
        }
    }
}

/// Parses arguments, runs the command, prints its output and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { commands::EXIT_INVALID } else { commands::EXIT_OK };
        }
    };
    let out = execute(cli);
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    out.code
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn argument_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn lists_and_negative_values_parse() {
        let cli = Cli::try_parse_from(["qconn", "analyze", "x.json", "--formal-balls", "0,1/2", "--scale", "-1"]).unwrap();
        let Command::Analyze { formal_balls, scale, .. } = cli.command else { panic!() };
        assert_eq!(formal_balls.unwrap().0.len(), 2);
        assert_eq!(scale, vec![Rational::from_integer((-1).into())]);
    }
}
