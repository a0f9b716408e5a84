//! `hodge-limit`: one subcommand per computational module, each producing a
//! pass/fail [`report::Report`].
//!
//! Exit codes: 0 when every check passes, 1 on a failed check or a failed
//! computation, 2 on usage, configuration or parse errors.

mod commands;
mod goldens;
mod input;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::input::InputError;
use crate::report::{render, Format};

pub const DEFAULT_SEED: u64 = 20_240_611;

#[derive(Parser, Debug)]
#[command(name = "hodge-limit", version, about = "Limiting mixed Hodge structures of SNC degenerations")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Input document (JSON, or TOML by extension).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Report destination; a directory for `emit-goldens`. Defaults to stdout.
    #[arg(long, visible_alias = "report", global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Eigenvalue `p/q` in `[0, 1)`, or `all`.
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    #[arg(long, env = "HODGE_LIMIT_SEED", default_value_t = DEFAULT_SEED, global = true)]
    pub seed: u64,
    /// Absolute tolerance for numerical checks.
    #[arg(long, visible_alias = "tol", global = true)]
    pub tol_abs: Option<f64>,
    /// Relative tolerance for numerical checks, added to the absolute one.
    #[arg(long, global = true)]
    pub tol_rel: Option<f64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Monodromy weight filtration of a nilpotent matrix.
    Weightfilt,
    /// Cohomology of a bigraded Hodge-Lefschetz structure with a differential.
    Cohomology,
    /// E1/E2 pages, limit Hodge numbers and checks for a degeneration.
    Degeneration,
    /// Kernel generators and Artinian lengths of a local model.
    LocalModel(commands::LocalModelArgs),
    /// Numerical residue checks on a model chart.
    MellinVerify(commands::MellinArgs),
    /// Regenerate golden reports for a bundled suite.
    EmitGoldens(goldens::GoldenArgs),
    /// Seeded smoke run over every module.
    Selftest(commands::SelftestArgs),
}

/// Exit code 2 for problems with how the tool was invoked or fed.
fn is_usage_error(err: &anyhow::Error) -> bool {
    if err.downcast_ref::<InputError>().is_some() || err.downcast_ref::<goldens::UnknownSuite>().is_some() {
        return true;
    }
    matches!(
        err.downcast_ref::<hodge_limit::Error>(),
        Some(
            hodge_limit::Error::InvalidInput(_)
                | hodge_limit::Error::UnknownEigenvalue(_)
                | hodge_limit::Error::TruncationTooSmall { .. }
                | hodge_limit::Error::MapShapeMismatch(_)
                | hodge_limit::Error::MissingStratum(_)
        )
    )
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(jobs) = cli.global.jobs {
        if jobs == 0 {
            return Err(InputError::Config("--jobs must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    if let Command::EmitGoldens(args) = &cli.command {
        return goldens::emit(&cli.global, args);
    }
    let report = commands::dispatch(&cli.global, &cli.command)?;
    let mut out: Box<dyn Write> = match &cli.global.output {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).map_err(|e| InputError::Config(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    };
    render(&report, cli.global.format, &mut out)?;
    out.flush()?;
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(if is_usage_error(&err) { 2 } else { 1 })
        }
    }
}
