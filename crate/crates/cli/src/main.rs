//! `toric`: command-line analysis of mass-action reaction networks.
//!
//! Exit codes: 0 on success, 1 on a domain failure (for example a system
//! that is not complex balancing), 2 on usage or input errors.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use toric_crn::dynamics::Method;
use toric_crn::tree::DEFAULT_ENUMERATION_LIMIT;

use crate::commands::SimulateArgs;
use crate::report::{render, Format};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Domain(_) => "domain",
            CliError::Io(_) => "io",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<toric_crn::Error> for CliError {
    fn from(e: toric_crn::Error) -> Self {
        use toric_crn::Error as E;
        match e {
            E::Syntax { .. }
            | E::NegativeCoefficient { .. }
            | E::NonPositiveRate { .. }
            | E::DuplicateReaction { .. }
            | E::SelfLoop(_)
            | E::InvalidNetwork(_)
            | E::RateDomainMismatch { .. }
            | E::MissingRate { .. }
            | E::LengthMismatch { .. }
            | E::NonPositiveInitial
            | E::EmptyFace
            | E::FaceIndexOutOfRange { .. }
            | E::InvalidConfig(_) => CliError::Usage(e.to_string()),
            E::ClassTooLarge { .. }
            | E::TooManyPairs { .. }
            | E::NotWeaklyReversible
            | E::NotReversible(_)
            | E::NotComplexBalancing { .. }
            | E::NotDetailedBalancing
            | E::NegativeConcentration
            | E::MaxIterations { .. }
            | E::NonFinite { .. } => CliError::Domain(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "toric", version, about = "Toric dynamical systems analysis of mass-action reaction networks")]
struct Cli {
    #[command(flatten)]
    globals: Globals,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Globals {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Tolerance for floating-point decisions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for sampling-based checks.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Rk4,
    Rk45,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Rk4 => Method::Rk4,
            MethodArg::Rk45 => Method::Rk45,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Structural invariants: complexes, linkage classes, deficiency, weak reversibility.
    Analyze {
        /// Network file, or the name of a bundled example.
        network: String,
    },
    /// Tree constants K_i of every complex.
    TreeConstants {
        network: String,
        /// Rates file with `i j value` lines; overrides inline rates.
        #[arg(long)]
        rates: Option<PathBuf>,
        /// Largest linkage class for which monomial counts are enumerated.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        limit: usize,
    },
    /// Balancing decisions.
    Check {
        #[command(subcommand)]
        which: Check,
    },
    /// Unique positive steady state in the invariant polyhedron of the initial state.
    Birch {
        network: String,
        #[arg(long)]
        rates: Option<PathBuf>,
        /// Initial concentrations, comma separated or a file.
        #[arg(long)]
        initial: String,
    },
    /// Integrate the mass-action system and record monitors.
    Simulate {
        network: String,
        #[arg(long)]
        rates: Option<PathBuf>,
        #[arg(long)]
        initial: String,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, value_enum, default_value = "rk45")]
        method: MethodArg,
        /// Fixed step for rk4, initial step for rk45.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Keep every this many accepted steps.
        #[arg(long, default_value_t = 1)]
        sample_every: usize,
        /// Write the trajectory CSV here and print a summary instead.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Acyclic orientations, Farkas certificates and the descent check for a face.
    Strata {
        network: String,
        #[arg(long)]
        rates: Option<PathBuf>,
        #[arg(long)]
        initial: String,
        /// Species indices of the face, as `I=1,3`.
        #[arg(long)]
        face: String,
        /// Length of the trajectory sampled for the descent check.
        #[arg(long, default_value_t = 20.0)]
        t_end: f64,
    },
    /// Run every bundled network end to end against known values.
    Corpus {
        /// Random rate vectors per network.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
}

#[derive(Debug, Subcommand)]
enum Check {
    /// Complex balancing: the tree constants satisfy every binomial.
    Cb {
        network: String,
        #[arg(long)]
        rates: Option<PathBuf>,
    },
    /// Detailed balancing: every circuit product equals one.
    Db {
        network: String,
        #[arg(long)]
        rates: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<commands::Outcome, CliError> {
    let g = &cli.globals;
    match cli.command {
        Command::Analyze { network } => commands::analyze(&network),
        Command::TreeConstants { network, rates, limit } => commands::tree_constants(&network, rates, limit),
        Command::Check { which: Check::Cb { network, rates } } => commands::check_cb(&network, rates, g.tol),
        Command::Check { which: Check::Db { network, rates } } => commands::check_db(&network, rates, g.tol),
        Command::Birch {
            network,
            rates,
            initial,
        } => commands::birch(&network, rates, &initial, g.tol),
        Command::Simulate {
            network,
            rates,
            initial,
            t_end,
            method,
            step,
            sample_every,
            out,
        } => commands::simulate_cmd(
            &network,
            SimulateArgs {
                rates,
                initial,
                t_end,
                method: method.into(),
                step,
                sample_every,
                out,
            },
        ),
        Command::Strata {
            network,
            rates,
            initial,
            face,
            t_end,
        } => commands::strata(&network, rates, &initial, &face, t_end, g.tol),
        Command::Corpus { samples } => commands::corpus(g.seed, samples),
    }
}

fn diagnose(format: Format, kind: &str, message: &str) {
    match format {
        Format::Json => eprintln!("{}", json!({"error": {"kind": kind, "message": message}})),
        _ => eprintln!("toric: {kind} error: {message}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.globals.format;
    let outcome = run(cli).and_then(|o| Ok((render(&o.output, format)?, o.failure)));
    match outcome {
        Ok((text, failure)) => {
            print!("{text}");
            match failure {
                Some(msg) => {
                    diagnose(format, "domain", &msg);
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            diagnose(format, e.kind(), &e.to_string());
            ExitCode::from(e.exit_code())
        }
    }
}
