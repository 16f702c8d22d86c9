use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "iontrap",
    version,
    about = "Structure and intrinsic decoherence budget of a linear trapped-ion array"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact equilibrium positions.
    Positions(StructureCmd),
    /// Longitudinal normal-mode frequencies.
    Modes(StructureCmd),
    /// Continuum structure laws, optionally with a spacing profile.
    Continuum(ContinuumCmd),
    /// Exact lattice sums against their continuum estimates.
    Sums(SumsCmd),
    /// Decoherence budget of one array.
    Decohere(DecohereCmd),
    /// N-scaling sweep of the vibrational rate.
    Sweep(SweepCmd),
    /// Exact two-level evolution against the adiabatic phase.
    SpinVerify(SpinVerifyCmd),
    /// Monte Carlo of the vibrational dephasing of one ion.
    McDephase(McCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Ba138,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Constants {
    Si,
    Unit,
}

#[derive(Args, Debug, Clone, Default)]
pub struct InputArgs {
    /// Built-in parameter set (also the default when nothing else is given).
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Flat TOML file of parameters; flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Number of ions.
    #[arg(long = "n", visible_alias = "n-ions", value_name = "N", value_parser = clap::value_parser!(u64).range(1..=10_000_000))]
    pub n_ions: Option<u64>,
    /// Axial trap frequency, rad/s.
    #[arg(long)]
    pub omega_z: Option<f64>,
    /// Representative transverse mode frequency, rad/s.
    #[arg(long)]
    pub omega_t: Option<f64>,
    /// Ion mass in atomic mass units.
    #[arg(long)]
    pub mass_amu: Option<f64>,
    #[arg(long)]
    pub charge_number: Option<u32>,
    /// Temperature, K.
    #[arg(long)]
    pub temperature: Option<f64>,
    /// `unit` sets ħ, c, k_B, e²/4πε₀ and the amu to one.
    #[arg(long, value_enum)]
    pub constants: Option<Constants>,
    /// Continuum model: simple-balance, dubin-fluid or hughes-fit.
    #[arg(long)]
    pub model: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct TransitionArgs {
    /// Multipole order a (1 = E1, 2 = E2).
    #[arg(long)]
    pub multipole_a: Option<u32>,
    /// Transition angular frequency, rad/s.
    #[arg(long)]
    pub omega_0: Option<f64>,
    /// Excited-state lifetime, s.
    #[arg(long)]
    pub tau_s: Option<f64>,
    #[arg(long)]
    pub coupling_constant: Option<f64>,
    /// Radiative window: two-over-n (2τ_s/N) or one-over-n (τ_s/N).
    #[arg(long)]
    pub radiative: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write data here instead of stdout; the manifest goes next to it.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StructureCmd {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ContinuumCmd {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Tabulate s(z) and n(z) of the chosen model at this many points.
    #[arg(long, value_name = "K", value_parser = clap::value_parser!(u64).range(1..=1_000_000))]
    pub profile: Option<u64>,
    /// Also solve the exact chain and compare its minimum gap.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug)]
pub struct SumsCmd {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Sum orders n.
    #[arg(long, value_delimiter = ',', default_values_t = (3..=16).collect::<Vec<u32>>())]
    pub orders: Vec<u32>,
    /// Ion for S_n(i); defaults to the central ion.
    #[arg(long)]
    pub ion: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DecohereCmd {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub transition: TransitionArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Tabulate per-ion rates instead of the one-row summary.
    #[arg(long)]
    pub per_ion: bool,
}

#[derive(Args, Debug)]
pub struct SweepCmd {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub transition: TransitionArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// fixed-s0 or fixed-omega-z.
    #[arg(long, default_value = "fixed-omega-z")]
    pub regime: String,
    /// exact, closed-form9, closed-form11 or sum-pipeline.
    #[arg(long, default_value = "closed-form9")]
    pub path: String,
    /// Explicit ascending N values.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["n_min", "n_max", "n_points"])]
    pub n_list: Option<Vec<usize>>,
    #[arg(long, default_value_t = 100)]
    pub n_min: usize,
    #[arg(long, default_value_t = 1000)]
    pub n_max: usize,
    /// Logarithmically spaced points between n-min and n-max.
    #[arg(long, default_value_t = 10)]
    pub n_points: usize,
    /// Largest N the exact path accepts.
    #[arg(long, default_value_t = 2000)]
    pub exact_cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DriveKind {
    Static,
    Sinusoid,
    Circular,
}

#[derive(Args, Debug)]
pub struct SpinVerifyCmd {
    #[command(flatten)]
    pub output: OutputArgs,
    /// Static splitting ω₀, rad/s.
    #[arg(long, default_value_t = 1.0e4)]
    pub omega_0: f64,
    /// Field amplitude over ω₀.
    #[arg(long, default_value_t = 1.0e-2)]
    pub ratio: f64,
    #[arg(long, value_enum, default_value_t = DriveKind::Static)]
    pub drive: DriveKind,
    /// Drive frequency over ω₀ (sinusoid and circular drives).
    #[arg(long, default_value_t = 1.0e-3)]
    pub frequency_ratio: f64,
    /// Largest Φ on the time grid, rad.
    #[arg(long, default_value_t = std::f64::consts::PI)]
    pub phi_max: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long, default_value_t = 50)]
    pub steps_per_period: usize,
}

#[derive(Args, Debug)]
pub struct McCmd {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub transition: TransitionArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, required = true)]
    pub seed: u64,
    #[arg(long, required = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Ion index; defaults to the central ion.
    #[arg(long)]
    pub ion: Option<usize>,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// End of the time grid, s; defaults to 2τ_i.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub zero_amplitudes: bool,
}
