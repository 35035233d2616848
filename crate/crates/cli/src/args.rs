use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qsd",
    version,
    about = "Quantum state discrimination calculators and simulations"
)]
pub struct Cli {
    /// Read every angle argument in degrees instead of radians.
    #[arg(long, global = true)]
    pub degrees: bool,

    /// Write output to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum-error discrimination of two pure states (CSV).
    Helstrom(HelstromArgs),
    /// Unambiguous discrimination: two-state optimum or symmetric family (JSON or CSV).
    Udp(UdpArgs),
    /// Cloning, separation, estimation and universal-cloning limits (CSV).
    Bounds(BoundsArgs),
    /// Seeded Monte Carlo runs compared with the analytic values (CSV).
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct HelstromArgs {
    /// Half-angle between the states, in (0, pi/4].
    #[arg(long, conflicts_with = "grid", allow_negative_numbers = true)]
    pub theta: Option<f64>,

    /// Tabulate theta_i = i (pi/4) / N for i = 1..N.
    #[arg(long, value_name = "N")]
    pub grid: Option<usize>,

    /// Prior probability of the `+` state.
    #[arg(long, default_value_t = 0.5)]
    pub eta_plus: f64,

    /// Angular step of the brute-force search, in radians.
    #[arg(long, default_value_t = 1e-4)]
    pub resolution: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct UdpArgs {
    /// Two-state family half-angle, in (0, pi/4].
    #[arg(long, conflicts_with = "coeffs", required_unless_present = "coeffs")]
    pub theta: Option<f64>,

    /// Symmetric-family coefficients, comma separated (renormalized), or `uniform`.
    #[arg(long)]
    pub coeffs: Option<String>,

    /// Number of states for `--coeffs uniform`.
    #[arg(long, default_value_t = 3)]
    pub n: usize,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Number of input copies M.
    #[arg(long, default_value_t = 1)]
    pub m: u32,

    /// Number of output copies N (defaults to M).
    #[arg(long)]
    pub n: Option<u32>,

    /// Overlap modulus of the two states; selects the exact-cloning table.
    #[arg(long, conflicts_with = "estimation")]
    pub overlap: Option<f64>,

    /// Select the state-estimation and universal-cloning table (the default
    /// when no overlap is given).
    #[arg(long)]
    pub estimation: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    HelstromSweep,
    Trine,
    Idp,
    SymmetricUd,
    Concentrate,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub scenario: Scenario,

    /// Random seed; falls back to QSD_SEED, then 1.
    #[arg(long, env = "QSD_SEED", default_value_t = 1)]
    pub seed: u64,

    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,

    /// Angle(s), comma separated. Defaults depend on the scenario.
    #[arg(long, value_delimiter = ',')]
    pub theta: Vec<f64>,

    /// Sweep theta_i = i (pi/4) / N (helstrom-sweep only).
    #[arg(long, value_name = "N", conflicts_with = "theta")]
    pub grid: Option<usize>,

    /// Coefficients for symmetric-ud and concentrate, comma separated.
    #[arg(long)]
    pub coeffs: Option<String>,

    /// Number of states for `--coeffs uniform`.
    #[arg(long, default_value_t = 3)]
    pub n: usize,

    /// Pass threshold in standard errors.
    #[arg(long, default_value_t = 3.0)]
    pub reporting: f64,
}
