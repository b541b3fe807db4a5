//! `prpos`: positivity certificates for P-recursive sequences.
//!
//! Exit codes: 0 success or accept, 1 error or reject, 2 inconclusive.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use prpos_core::exactmath::Rational;

#[derive(Parser, Debug)]
#[command(name = "prpos", version, about = "Exact positivity certificates for P-recursive sequences")]
struct Cli {
    /// Print extra detail (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct WitnessArgs {
    /// Lower ratio bound, as an integer or "a/b".
    #[arg(long, requires = "q")]
    p: Option<Rational>,
    /// Upper ratio bound, as an integer or "a/b".
    #[arg(long, requires = "p")]
    q: Option<Rational>,
    /// Require every numerator to have the common denominator degree.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Characteristic polynomial, dominant root and suggested witness.
    Analyze {
        spec: PathBuf,
        #[command(flatten)]
        witness: WitnessArgs,
        /// Print the JSON report instead of text.
        #[arg(long)]
        json: bool,
        /// Also write the JSON report to this file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Prove positivity and write a certificate.
    Certify {
        spec: PathBuf,
        #[command(flatten)]
        witness: WitnessArgs,
        /// Largest number of window starts tried past r (default 10 r + 10^6).
        #[arg(long)]
        scan_budget: Option<i64>,
        /// Certificate path (default: <spec stem>.poscert.json).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Print the summary as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Re-verify a certificate from scratch.
    Check {
        certificate: PathBuf,
        /// Print the verdict as JSON.
        #[arg(long)]
        json: bool,
    },
    /// List exact terms up to index n.
    Terms {
        spec: PathBuf,
        n: i64,
        /// Print every digit of large terms.
        #[arg(long)]
        full: bool,
        /// Print the listing as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubcommandKind {
    Analyze,
    Certify,
    Check,
    Terms,
}

/// Validated options for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub subcommand: SubcommandKind,
    /// Spec file, or the certificate file for `check`.
    pub path: PathBuf,
    pub pq: Option<(Rational, Rational)>,
    pub scan_budget: Option<i64>,
    pub strict: bool,
    pub output: Option<PathBuf>,
    pub full: bool,
    pub json: bool,
    pub verbosity: u8,
    pub n: Option<i64>,
}

impl RunConfig {
    fn new(subcommand: SubcommandKind, path: PathBuf, verbosity: u8) -> Self {
        RunConfig {
            subcommand,
            path,
            pq: None,
            scan_budget: None,
            strict: false,
            output: None,
            full: false,
            json: false,
            verbosity,
            n: None,
        }
    }

    fn with_witness(mut self, w: WitnessArgs) -> Result<Self, String> {
        self.strict = w.strict;
        self.pq = match (w.p, w.q) {
            (Some(p), Some(q)) if p < q => Some((p, q)),
            (Some(p), Some(q)) => return Err(format!("--p must be smaller than --q (got p = {p}, q = {q})")),
            (None, None) => None,
            _ => return Err("--p and --q must be given together".into()),
        };
        Ok(self)
    }
}

fn config(cli: Cli) -> Result<RunConfig, String> {
    let v = cli.verbose;
    match cli.command {
        Command::Analyze { spec, witness, json, output } => {
            let mut cfg = RunConfig::new(SubcommandKind::Analyze, spec, v).with_witness(witness)?;
            cfg.json = json;
            cfg.output = output;
            Ok(cfg)
        }
        Command::Certify { spec, witness, scan_budget, output, json } => {
            if scan_budget.is_some_and(|b| b < 0) {
                return Err("--scan-budget must be nonnegative".into());
            }
            let mut cfg = RunConfig::new(SubcommandKind::Certify, spec, v).with_witness(witness)?;
            cfg.scan_budget = scan_budget;
            cfg.output = output;
            cfg.json = json;
            Ok(cfg)
        }
        Command::Check { certificate, json } => {
            let mut cfg = RunConfig::new(SubcommandKind::Check, certificate, v);
            cfg.json = json;
            Ok(cfg)
        }
        Command::Terms { spec, n, full, json } => {
            let mut cfg = RunConfig::new(SubcommandKind::Terms, spec, v);
            cfg.n = Some(n);
            cfg.full = full;
            cfg.json = json;
            Ok(cfg)
        }
    }
}

fn main() -> ExitCode {
    // Exit quietly when stdout is closed early, as in `prpos terms ... | head`.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match config(cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    match commands::run(&cfg) {
        Ok(outcome) => ExitCode::from(outcome as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
