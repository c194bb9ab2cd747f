//! `ncsym`: command-line front end.
//!
//! Exit codes: 0 success, 1 failed check or assertion, 2 parse or input
//! error, 3 inadmissible space, 4 numeric failure, 5 inconclusive search.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::{Format, Overrides, RunConfig};

pub const EXIT_CHECK: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_INADMISSIBLE: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;
pub const EXIT_INCONCLUSIVE: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "ncsym", version, about = "Unitary ideal norms, Khintchine checks, Grothendieck certificates and Schur multipliers")]
struct Cli {
    /// Master seed; per-instance seeds are derived from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Iteration budget override for the command's main optimizer.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Append the report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Omit the timestamp so reruns are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Plain-text `key=value` file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Norm of a matrix or vector in a gauge, ideal or grid space.
    Norm(commands::NormArgs),
    /// Constant-one Khintchine inequalities on random tuples.
    KhVerify(commands::KhArgs),
    /// Little-Grothendieck certificates for a map into Hilbert space.
    Gro(commands::GroArgs),
    /// Schur multiplier norms and their characterizations.
    Schur(commands::SchurArgs),
    /// Fast end-to-end sanity suite.
    Selftest(commands::SelftestArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = Overrides { seed: cli.seed, tol: cli.tol, budget: cli.budget, out: cli.out, format: cli.format, no_timestamp: cli.no_timestamp };
    let cfg = match RunConfig::load(cli.config.as_deref(), flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_PARSE);
        }
    };
    let (name, run) = match &cli.command {
        Command::Norm(a) => ("norm", commands::norm(a, &cfg)),
        Command::KhVerify(a) => ("kh-verify", commands::kh_verify(a, &cfg)),
        Command::Gro(a) => ("gro", commands::gro(a, &cfg)),
        Command::Schur(a) => ("schur", commands::schur(a, &cfg)),
        Command::Selftest(a) => ("selftest", commands::selftest(a, &cfg)),
    };
    let args = match &cli.command {
        Command::Norm(a) => serde_json::to_value(a),
        Command::KhVerify(a) => serde_json::to_value(a),
        Command::Gro(a) => serde_json::to_value(a),
        Command::Schur(a) => serde_json::to_value(a),
        Command::Selftest(a) => serde_json::to_value(a),
    }
    .expect("arguments serialize");
    let (report, code) = match run {
        Ok(o) => (report::envelope(name, &cfg, args, o.result, o.status), o.code),
        Err(e) => {
            eprintln!("error: {e}");
            let (kind, code) = commands::classify(&e);
            (report::envelope(name, &cfg, args, json!({ "error": kind, "message": e.to_string() }), "error"), code)
        }
    };
    if let Err(e) = report::emit(&report, &cfg) {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(EXIT_PARSE);
    }
    ExitCode::from(code)
}
