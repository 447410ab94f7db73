// SPDX-License-Identifier: Apache-2.0

//! `qrdp`: privacy budget queries, sweeps and composition simulation for
//! noisy quantum devices.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qrdp::{AccountingMode, AlphaGrid, NoiseParam, NoiseSpec, RenyiOrder};

#[derive(Debug, Parser)]
#[command(name = "qrdp", version, about = "Quantum Rényi differential privacy accounting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form budget of one mechanism at one order.
    Budget(BudgetArgs),
    /// Budget grid over one noise parameter, as CSV.
    Sweep(SweepArgs),
    /// Divergence of a concrete measured state pair, both directions.
    Exact(ExactArgs),
    /// Budget and fidelity over one noise parameter, as CSV.
    Utility(UtilityArgs),
    /// Compose budgets across rounds of a multi-QPU workload.
    Simulate(SimulateArgs),
    /// Audit a channel document for complete positivity and trace preservation.
    CheckChannel(CheckChannelArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mech {
    Gad,
    Pd,
    Pad,
    Dep,
}

/// Noise parameters; the ones a mechanism does not use are ignored.
#[derive(Debug, Args)]
struct NoiseArgs {
    /// Thermal excitation probability (gad, pad) or depolarizing probability (dep).
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Amplitude damping strength.
    #[arg(long, default_value_t = 0.3)]
    gamma: f64,
    /// Phase damping strength.
    #[arg(long, default_value_t = 0.2)]
    lambda: f64,
    /// Hilbert-space dimension for dep.
    #[arg(long = "D", default_value_t = 2)]
    dim: usize,
}

impl NoiseArgs {
    fn spec(&self, mech: Mech) -> NoiseSpec {
        match mech {
            Mech::Gad => NoiseSpec::Gad { p: self.p, gamma: self.gamma },
            Mech::Pd => NoiseSpec::Pd { lambda: self.lambda },
            Mech::Pad => NoiseSpec::Pad { p: self.p, gamma: self.gamma, lambda: self.lambda },
            Mech::Dep => NoiseSpec::Dep { p: self.p, dim: self.dim },
        }
    }
}

fn parse_order(s: &str) -> Result<RenyiOrder, String> {
    s.parse::<RenyiOrder>().map_err(|e| e.to_string())
}

fn parse_grid(s: &str) -> Result<AlphaGrid, String> {
    s.parse::<AlphaGrid>().map_err(|e| e.to_string())
}

fn parse_param(s: &str) -> Result<NoiseParam, String> {
    s.parse::<NoiseParam>().map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
struct BudgetArgs {
    #[arg(long, value_enum)]
    mech: Mech,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Trace-distance bound between neighboring inputs.
    #[arg(long)]
    d: f64,
    /// Rényi order (`inf` for the pure endpoint).
    #[arg(long, value_parser = parse_order)]
    alpha: RenyiOrder,
    /// Also convert to an (eps, delta) guarantee.
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// JSON sweep specification.
    #[arg(long)]
    spec: PathBuf,
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExactArgs {
    #[arg(long)]
    rho: PathBuf,
    #[arg(long)]
    sigma: PathBuf,
    /// JSON POVM; computational basis when omitted.
    #[arg(long)]
    povm: Option<PathBuf>,
    #[arg(long, value_enum)]
    mech: Mech,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long, value_parser = parse_order)]
    alpha: RenyiOrder,
    /// Trace-distance bound the pair must respect.
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    /// Random POVM trials for a lower bound on the worst case.
    #[arg(long, default_value_t = 0)]
    search: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct UtilityArgs {
    #[arg(long, value_enum, default_value = "dep")]
    mech: Mech,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Swept parameter: p, gamma or lambda.
    #[arg(long, value_parser = parse_param, default_value = "p")]
    param: NoiseParam,
    #[arg(long, default_value_t = 0.1)]
    lo: f64,
    #[arg(long, default_value_t = 0.9)]
    hi: f64,
    #[arg(long, default_value_t = 9)]
    steps: usize,
    #[arg(long, default_value_t = 0.1)]
    d: f64,
    #[arg(long, value_parser = parse_grid, default_value = "2")]
    grid: AlphaGrid,
    /// Reference qubit state; `[[0.3, 0.2], [0.2, 0.7]]` when omitted.
    #[arg(long)]
    rho: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// JSON workload document.
    #[arg(long)]
    workload: PathBuf,
    #[arg(long, default_value_t = 1e-5)]
    delta: f64,
    #[arg(long, value_parser = parse_grid, default_value = "1.25,1.5,2,3,4,8,16,32,64,inf")]
    grid: AlphaGrid,
    #[arg(long, value_parser = parse_mode, default_value = "intuitive")]
    mode: AccountingMode,
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Full JSON report destination.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<AccountingMode, String> {
    s.parse()
}

#[derive(Debug, Args)]
struct CheckChannelArgs {
    /// JSON channel document.
    #[arg(long)]
    channel: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Budget(args) => commands::budget(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Exact(args) => commands::exact(args),
        Command::Utility(args) => commands::utility(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::CheckChannel(args) => commands::check_channel(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("qrdp: {err}");
            ExitCode::from(err.code as u8)
        }
    }
}
