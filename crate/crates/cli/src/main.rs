#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eit_cli::{run, CliError, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "eit", version, about = "EIT forward solves and monotonicity reconstructions")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Experiment description (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Generate and tag the mesh.
    Mesh,
    /// Solve one forward problem for the phantom.
    Forward,
    /// Background and phantom ND maps.
    Ndmap,
    /// Run the configured reconstruction.
    Reconstruct,
    /// ND-map convergence under ε-truncation.
    Convergence,
    /// Closed-form radial eigenvalues.
    Oracle,
    /// Check the monotonicity inequalities numerically.
    VerifyBounds,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Mesh => Command::Mesh,
            Cmd::Forward => Command::Forward,
            Cmd::Ndmap => Command::NdMap,
            Cmd::Reconstruct => Command::Reconstruct,
            Cmd::Convergence => Command::Convergence,
            Cmd::Oracle => Command::Oracle,
            Cmd::VerifyBounds => Command::VerifyBounds,
        }
    }
}

fn execute(cli: &Cli) -> Result<PathBuf, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Validation("--config <path> is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::parse(&text).map_err(|e| match e {
        CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
        other => other,
    })?;
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("--threads: {e}")))?;
    }
    run(cli.command.into(), &cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(summary) => {
            println!("{}", summary.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
