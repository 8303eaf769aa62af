//! `pbs`: check, evaluate, compare, normalise, unroll and render PBS-diagrams
//! written in the `.pbs` text format.
//!
//! Exit codes: 0 success or equivalent, 1 parse or type error, 2 evaluation
//! error, 3 incomparable gates, 4 diagram not eligible for unrolling, 5 rule
//! verification failure, 6 diagrams not equivalent.

mod commands;
mod demo;
mod structured;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pbs_core::frontend::RenderFormat;
use pbs_core::Polarisation;

#[derive(Parser, Debug)]
#[command(name = "pbs", version, about = "PBS-diagram toolkit")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every command.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Definition to use; defaults to the last `def` in the file.
    #[arg(long, global = true)]
    pub entry: Option<String>,
    /// Matrix dimension for gate-free or identity-only evaluation.
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub q: u64,
    /// Relative tolerance for matrix comparisons.
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = positive_f64)]
    pub tol: f64,
    /// Seed for randomised verification.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Trials per rule and dimension for `rules verify`.
    #[arg(long, global = true, default_value_t = 100)]
    pub trials: usize,
    /// Output style.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Write the output to a file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON sidecar giving matrices for `sym` gates, keyed by name.
    #[arg(long, global = true)]
    pub matrices: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Human,
    Structured,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum RenderTarget {
    Dot,
    Tikz,
}

impl From<RenderTarget> for RenderFormat {
    fn from(t: RenderTarget) -> Self {
        match t {
            RenderTarget::Dot => RenderFormat::Dot,
            RenderTarget::Tikz => RenderFormat::Tikz,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and type-check a module.
    Check { file: PathBuf },
    /// Follow one photon: polarisation (H, V, → or ↑) and position.
    Path {
        file: PathBuf,
        #[arg(value_parser = parse_polarisation)]
        pol: Polarisation,
        pos: usize,
    },
    /// Decide whether two definitions of a module are equivalent.
    Equiv {
        file: PathBuf,
        first: String,
        second: String,
    },
    /// Print the canonical form.
    Normalize { file: PathBuf },
    /// Produce a trace-free equivalent of a numeric diagram.
    Unroll { file: PathBuf },
    /// Operations on the rule library.
    Rules {
        #[command(subcommand)]
        action: RulesAction,
    },
    /// Render as a DOT graph or a TikZ picture.
    Render {
        #[arg(value_enum)]
        target: RenderTarget,
        file: PathBuf,
    },
    /// Run one of the built-in demonstrations.
    Demo {
        #[command(subcommand)]
        which: DemoKind,
    },
}

#[derive(Subcommand, Debug)]
enum RulesAction {
    /// Verify every rule semantically at q = 1 and q = 2.
    Verify {
        /// Also verify the deliberately unsound control rule.
        #[arg(long)]
        include_planted: bool,
    },
}

#[derive(Subcommand, Debug)]
enum DemoKind {
    /// The quantum switch applies UV or VU depending on the polarisation.
    Qswitch,
    /// Decide whether two unitaries commute or anti-commute with one query.
    Commutation {
        /// A built-in name (I, X, Y, Z, H) or a matrix literal.
        #[arg(default_value = "X")]
        u: String,
        #[arg(default_value = "Z")]
        v: String,
    },
    /// The two controlled-permutation diagrams on three wires.
    Permutation,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn parse_polarisation(s: &str) -> Result<Polarisation, String> {
    s.parse()
}

/// A command failure: the exit code and the message for standard error.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

/// What a command produced: text for the chosen output and the exit code.
pub struct Report {
    pub text: String,
    pub code: u8,
}

impl Report {
    pub fn ok(text: String) -> Self {
        Report { text, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = cli.run.clone();
    let result = match cli.command {
        Command::Check { file } => commands::check(&cfg, &file),
        Command::Path { file, pol, pos } => commands::path(&cfg, &file, pol, pos),
        Command::Equiv { file, first, second } => commands::equiv(&cfg, &file, &first, &second),
        Command::Normalize { file } => commands::normalize(&cfg, &file),
        Command::Unroll { file } => commands::unroll(&cfg, &file),
        Command::Rules {
            action: RulesAction::Verify { include_planted },
        } => commands::rules_verify(&cfg, include_planted),
        Command::Render { target, file } => commands::render(&cfg, &file, target.into()),
        Command::Demo { which } => match which {
            DemoKind::Qswitch => demo::qswitch(&cfg),
            DemoKind::Commutation { u, v } => demo::commutation(&cfg, &u, &v),
            DemoKind::Permutation => demo::permutation(&cfg),
        },
    };
    match result {
        Ok(report) => {
            if let Err(e) = commands::emit(&cfg, &report.text) {
                eprintln!("error: {}", e.message);
                return ExitCode::from(e.code);
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
