//! `mcycle`: build multiplicity cycles, run oracles and verification
//! campaigns from JSON manifests.

mod commands;
mod manifest;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read or write {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] mcycle::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use mcycle::Error as E;
        match self {
            CliError::Core(
                E::BudgetExceeded { .. } | E::TruncationUnstable { .. } | E::ComponentCapExceeded { .. },
            ) => 3,
            _ => 2,
        }
    }

    fn kind(&self) -> String {
        match self {
            CliError::Invalid(_) => "InvalidInput".into(),
            CliError::Io(_) => "Io".into(),
            CliError::Core(e) => {
                let dbg = format!("{e:?}");
                dbg.split(|c: char| !c.is_alphanumeric())
                    .next()
                    .unwrap_or("Error")
                    .to_string()
            }
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mcycle", version, about = "Multiplicity cycles for Pfaffian systems")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by all commands; each overrides the matching manifest field.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalOpts {
    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Multiplicity cap for the dual-space and Lie oracles.
    #[arg(long, global = true)]
    pub cap: Option<u32>,
    /// S-pair budget for Groebner computations.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Minimum leaf truncation order.
    #[arg(long, global = true)]
    pub truncation: Option<u32>,
    /// Independent slice draws per component.
    #[arg(long, global = true)]
    pub trials: Option<u32>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Render a plain-text table from the JSON report.
    #[arg(long, global = true)]
    pub table: bool,
    /// Test hook: halve every bound before comparing.
    #[arg(long, global = true, hide = true)]
    pub halve_bounds: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the cycle and report its degree profile, bounds and multiplicities.
    Bound { manifest: PathBuf },
    /// Run the brute-force oracles at the manifest points.
    Oracle { manifest: PathBuf },
    /// Check oracle <= bound at every point, or run a seeded campaign.
    Verify { manifest: PathBuf },
    /// Print the closed-form constants.
    Constants {
        /// Largest ambient dimension (at most 8).
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
    /// Betti and Euler bounds for a Milnor fiber.
    Milnor { manifest: PathBuf },
    /// Cycle bound for the order of contact of a vector field.
    Vf { manifest: PathBuf },
    /// Zero-estimate hypothesis and its multiplicity version on a torus.
    Group { manifest: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = cli.opts;
    let outcome = match cli.command {
        Command::Bound { manifest } => commands::load(&manifest).and_then(|m| commands::bound(&m, &opts)),
        Command::Oracle { manifest } => commands::load(&manifest).and_then(|m| commands::oracle(&m, &opts)),
        Command::Verify { manifest } => commands::load(&manifest).and_then(|m| commands::verify(&m, &opts)),
        Command::Constants { n_max } => commands::constants(n_max),
        Command::Milnor { manifest } => commands::load(&manifest).and_then(|m| commands::milnor(&m, &opts)),
        Command::Vf { manifest } => commands::load(&manifest).and_then(|m| commands::vf(&m, &opts)),
        Command::Group { manifest } => commands::load(&manifest).and_then(|m| commands::group(&m, &opts)),
    };
    let (report, code) = match outcome {
        Ok(out) => (out.report, out.code),
        Err(e) => (
            json!({"error": {"kind": e.kind(), "message": e.to_string(), "exit_code": e.exit_code()}}),
            e.exit_code(),
        ),
    };
    let text = if opts.table {
        render::table(&report)
    } else {
        serde_json::to_string_pretty(&report).expect("reports are plain JSON") + "\n"
    };
    match &opts.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}
