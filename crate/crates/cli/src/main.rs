mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use commands::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "teledepth",
    version,
    about = "Unit-depth multi-controlled Toffoli synthesis, verification and noisy simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decompose MCT over n controls and write the circuit.
    Synth(SynthArgs),
    /// Check a circuit file against the MCT oracle on every basis input.
    Verify(VerifyArgs),
    /// Classical fidelities over a grid of Toffoli and Bell-pair error rates.
    Sweep(SweepArgs),
    /// Depth, count and ancilla table against other decompositions.
    Compare(CompareArgs),
    /// Application circuits.
    Apps(AppsArgs),
    /// Recursion schedule and resource formulas, or measured metrics of a file.
    Metrics(MetricsArgs),
    /// Cellwise difference of two sweep CSVs.
    Delta(DeltaArgs),
    /// Re-run the command recorded in a manifest and compare output digests.
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Clone)]
pub struct OutDir {
    /// Directory all output files are written to.
    #[arg(long, default_value = ".", global = true)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct SynthArgs {
    /// Number of controls.
    #[arg(short = 'n', value_parser = clap::value_parser!(u32).range(2..=65536))]
    pub n: u32,
    /// Push classically controlled corrections past the Toffolis (default).
    #[arg(long, overrides_with = "no_defer")]
    pub defer: bool,
    #[arg(long)]
    pub no_defer: bool,
    /// Relabel qubits so every Toffoli acts on consecutive indices.
    #[arg(long)]
    pub layout: bool,
    /// Merge adjacent conditionals with equal support after deferral.
    #[arg(long)]
    pub merge: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutDir,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    pub circuit: PathBuf,
    #[arg(short = 'n', value_parser = clap::value_parser!(u32).range(1..=62))]
    pub n: u32,
    /// `exhaustive` or `sample:K`; exhaustive up to 4 controls, `sample:256` above.
    #[arg(long)]
    pub branches: Option<String>,
    /// Seed of the branch sample.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutDir,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpacingArg {
    Geometric,
    Linear,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[arg(short = 'n', value_parser = clap::value_parser!(u32).range(2..=62))]
    pub n: u32,
    /// Points per noise axis; the sweep has grid * grid cells.
    #[arg(long, default_value_t = 19, value_parser = clap::value_parser!(u32).range(1..=1000))]
    pub grid: u32,
    /// Trajectories per basis input per cell.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    pub min_rate: f64,
    #[arg(long, default_value_t = 1e-1)]
    pub max_rate: f64,
    #[arg(long, value_enum, default_value_t = SpacingArg::Geometric)]
    pub spacing: SpacingArg,
    /// Largest n accepted without raising the cap.
    #[arg(long, default_value_t = teledepth::fidelity::DEFAULT_MAX_N as u32)]
    pub max_n: u32,
    /// Sweep the undecomposed gate instead of the teleportation circuit.
    #[arg(long, conflicts_with = "circuit")]
    pub unitary: bool,
    /// Sweep a circuit file instead of the synthesized decomposition.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutDir,
}

#[derive(Args, Debug, Serialize)]
pub struct CompareArgs {
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(2..=65536))]
    pub n_max: u32,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutDir,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyArg {
    Unitary,
    Teleport,
}

#[derive(Args, Debug, Serialize)]
pub struct AppsArgs {
    #[command(subcommand)]
    pub app: App,
    /// Seed of the branch sample when branches are not enumerated.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutDir,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum App {
    /// |i> -> |i + 1 mod 2^q>.
    Adder {
        #[arg(short = 'q', value_parser = clap::value_parser!(u32).range(2..=16))]
        q: u32,
        #[arg(long, value_enum, default_value_t = StrategyArg::Teleport)]
        strategy: StrategyArg,
    },
    /// Single-word lookup: d ^= word iff r = 1 and the address matches.
    Qrom {
        #[arg(long)]
        address: String,
        #[arg(long)]
        word: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::Teleport)]
        strategy: StrategyArg,
    },
    /// Conjunction of all features onto one output qubit.
    Neuron {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=16))]
        features: u32,
        #[arg(long, value_enum, default_value_t = StrategyArg::Teleport)]
        strategy: StrategyArg,
    },
    /// Flip the class qubit iff the features equal a pattern.
    Rule {
        #[arg(long)]
        pattern: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::Teleport)]
        strategy: StrategyArg,
    },
    /// Toffoli depth of the teleported adder next to the per-gate bound sum.
    Depths {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(2..=64))]
        q_min: u32,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(2..=64))]
        q_max: u32,
    },
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("what").required(true).args(["n", "circuit"])))]
pub struct MetricsArgs {
    #[arg(short = 'n', value_parser = clap::value_parser!(u32).range(2..=65536))]
    pub n: Option<u32>,
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutDir,
}

#[derive(Args, Debug, Serialize)]
pub struct DeltaArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutDir,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    #[command(flatten)]
    pub out: OutDir,
}

impl Default for OutDir {
    fn default() -> Self {
        OutDir {
            out: PathBuf::from("."),
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match commands::run(cli, &argv) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
