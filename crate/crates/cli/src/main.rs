//! `lharm`: experiment runner for discrete potential theory on lattices.
//!
//! Every subcommand writes CSV artifacts to the output directory and prints
//! one verdict line per inequality check. The exit status is 0 iff every
//! check passes, 1 if some check fails and 2 on usage or input errors.

mod commands;
mod io;
mod sweep;
mod verdict;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "lharm", version, about = "Discrete harmonic functions on lattices")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct GlobalOpts {
    /// Output directory (default: $LHARM_OUT_DIR, else ./lharm-out).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for randomized subcommands.
    #[arg(long, global = true, value_name = "U64", default_value_t = 0)]
    pub seed: u64,
    /// Override the main tolerance of the subcommand's checks.
    #[arg(long, global = true, value_name = "REAL")]
    pub tol: Option<f64>,
    /// Starting quadrature points per axis for strip solves.
    #[arg(long, global = true, value_name = "POINTS")]
    pub quad: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Dirichlet problem: domain JSON + boundary CSV -> solution CSV.
    Solve(commands::SolveArgs),
    /// Dirichlet spectrum of a domain.
    Eig(commands::EigArgs),
    /// Strip problem from two boundary layers given as CSV.
    Strip(commands::StripArgs),
    /// Harmonic measure of the caps of a truncated cylinder.
    Measure(commands::CylinderArgs),
    /// Phragmén–Lindelöf lower bounds on a truncated cylinder.
    Pl(commands::PlArgs),
    /// Randomized conditional-stability checks.
    Stability(commands::StabilityArgs),
    /// Random-walk estimate of an exit probability.
    Mc(commands::McArgs),
    /// Parameter sweeps from a JSON config.
    Sweep(sweep::SweepArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    let result = match cli.command {
        Command::Solve(a) => commands::solve(&g, a),
        Command::Eig(a) => commands::eig(&g, a),
        Command::Strip(a) => commands::strip(&g, a),
        Command::Measure(a) => commands::measure(&g, a),
        Command::Pl(a) => commands::pl(&g, a),
        Command::Stability(a) => commands::stability(&g, a),
        Command::Mc(a) => commands::mc(&g, a),
        Command::Sweep(a) => sweep::run(&g, a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
