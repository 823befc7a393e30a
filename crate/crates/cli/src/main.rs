//! `wgfem`: mesh generation, single solves and convergence studies for the
//! built-in interface problems.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or I/O error, 3 numerical
//! failure.

// `!(x < y)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{parse_formats, Overrides, RunConfig, OUT_ENV};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn at_level(self, level: usize) -> CliError {
        let wrap = |m: String| format!("level {level}: {m}");
        match self {
            CliError::Usage(m) => CliError::Usage(wrap(m)),
            CliError::Data(m) => CliError::Data(wrap(m)),
            CliError::Numerical(m) => CliError::Numerical(wrap(m)),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<wgfem::Error> for CliError {
    fn from(e: wgfem::Error) -> Self {
        use wgfem::Error as E;
        let m = e.to_string();
        match e {
            E::UnknownProblem(_) => CliError::Usage(m),
            E::Element { .. } | E::Evaluation(_) | E::Singular(_) | E::Accuracy { .. } => {
                CliError::Numerical(m)
            }
            _ => CliError::Data(m),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "wgfem",
    version,
    about = "Weak Galerkin solver for 2D elliptic interface problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write `.node`/`.ele` files for each level and print mesh statistics.
    Mesh(Args),
    /// Solve one level and write the discrete solution.
    Solve(Args),
    /// Run a convergence study and write the error table.
    Study(Args),
    /// Print mesh and system sizes per level.
    Stats(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Flat `key = value` config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in problem, 1 to 10.
    #[arg(long)]
    problem: Option<u32>,
    /// Coefficient contrast (problems 1 and 3).
    #[arg(long)]
    b: Option<f64>,
    /// Wavenumber (problem 2).
    #[arg(long)]
    kappa: Option<f64>,
    /// Level to solve.
    #[arg(long)]
    level: Option<usize>,
    /// Number of levels.
    #[arg(long)]
    levels: Option<usize>,
    /// Read `level<k>.node`/`level<k>.ele` from this directory.
    #[arg(long)]
    mesh_dir: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = OUT_ENV)]
    out: Option<PathBuf>,
    /// Comma-separated list of csv, markdown, svg.
    #[arg(long)]
    format: Option<String>,
    /// Forcing term: fd or analytic.
    #[arg(long)]
    forcing: Option<String>,
    /// Finite-difference step for `--forcing fd`.
    #[arg(long)]
    hfd: Option<f64>,
    /// Plain structured meshes that ignore the interface.
    #[arg(long)]
    plain: bool,
    /// Cells per unit length for `--plain`.
    #[arg(long)]
    grid: Option<usize>,
    /// Replace all data by zero.
    #[arg(long)]
    homogeneous: bool,
}

impl Args {
    fn resolve(self) -> Result<RunConfig, CliError> {
        let formats = self
            .format
            .as_deref()
            .map(parse_formats)
            .transpose()
            .map_err(CliError::Usage)?;
        let flags = Overrides {
            problem: self.problem,
            b: self.b,
            kappa: self.kappa,
            level: self.level,
            levels: self.levels,
            mesh_dir: self.mesh_dir,
            out: self.out,
            formats,
            forcing: self.forcing,
            hfd: self.hfd,
            plain: self.plain.then_some(true),
            grid: self.grid,
            homogeneous: self.homogeneous.then_some(true),
        };
        RunConfig::resolve(flags, self.config.as_deref())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Mesh(a) => commands::cmd_mesh(&a.resolve()?),
        Command::Solve(a) => commands::cmd_solve(&a.resolve()?),
        Command::Study(a) => commands::cmd_study(&a.resolve()?),
        Command::Stats(a) => commands::cmd_stats(&a.resolve()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wgfem: {e}");
            ExitCode::from(e.code())
        }
    }
}
