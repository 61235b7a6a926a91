//! `finsler` command-line tool: evaluates the toolkit's procedures on a
//! configured Minkowski space and emits deterministic reports.
//!
//! Exit codes: 0 when every asserted check passes, 1 when an asserted check
//! fails or a computation error is recorded in the report, 2 for
//! configuration and usage errors (bad flags, unreadable or invalid config).

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::CommandContext;
use config::SpaceConfig;

#[derive(Parser)]
#[command(
    name = "finsler",
    version,
    about = "Numerical toolkit for Minkowski spaces in the Finsler sense",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: CommandName,

    /// Path to the JSON space configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    /// Override the random seed used for direction sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the number of sampled directions.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Override the command's primary assertion tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum CommandName {
    /// Sweep the four Euler homogeneity identities over random directions.
    Identities,
    /// Orthogonalize and normalize the configured basis.
    Orthogonalize,
    /// Emit the per-direction metrics P[k] and the contracted profile G.
    Profile,
    /// Solve for the Lie algebra of infinitesimal motions.
    Motions,
    /// Solve the quasimotion system and compare it with the motion algebra.
    Quasimotions,
    /// Fit the orthonormality-drift order over an epsilon ladder.
    Drift,
    /// Tabulate pairwise commutator residuals of the solved generators.
    Bracket,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => ExitCode::from(status),
        Err(message) => {
            eprintln!("{message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    let Some(path) = cli.config else {
        return Err("configuration error: --config <PATH> is required".to_string());
    };
    let config = SpaceConfig::load(&path).map_err(|e| e.to_string())?;
    let model = config.build_model().map_err(|e| e.to_string())?;
    let basis = config.build_basis().map_err(|e| e.to_string())?;

    let ctx = CommandContext {
        seed: cli.seed.or(config.seed).unwrap_or(42),
        samples: cli.samples.or(config.samples).unwrap_or(100),
        tol_override: cli.tol,
        config,
        model,
        basis,
    };

    let report = match cli.command {
        CommandName::Identities => commands::identities(&ctx),
        CommandName::Orthogonalize => commands::orthogonalize_cmd(&ctx),
        CommandName::Profile => commands::profile(&ctx),
        CommandName::Motions => commands::motions(&ctx),
        CommandName::Quasimotions => commands::quasimotions(&ctx),
        CommandName::Drift => commands::drift(&ctx),
        CommandName::Bracket => commands::bracket(&ctx),
    };

    let rendered = match cli.format {
        Format::Text => report::render_text(&report),
        Format::Json => report::render_json(&report),
    };
    print!("{rendered}");
    Ok(report.exit_status as u8)
}
