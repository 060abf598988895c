use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "driven-tls",
    version,
    about = "Quasienergy spectra and population dynamics of driven two-level and multi-level systems"
)]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quasienergy pair and gap versus A/omega, with a feature list.
    Spectrum(SpectrumArgs),
    /// Non-decay probability over time from |0>, with the plateau ladder.
    Dynamics(DynamicsArgs),
    /// Non-decay probability at the flip time versus A/omega.
    ScanPnd(ScanArgs),
    /// Static spectra, avoided crossings, driven dynamics and Floquet sweeps
    /// of a multi-level system.
    Multilevel(MultilevelArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long)]
    pub amp_min: f64,
    #[arg(long)]
    pub amp_max: f64,
    #[arg(long, default_value_t = 1400)]
    pub points: usize,
    #[arg(long, default_value_t = driven_tls::propagator::TLS_STEPS_PER_PERIOD)]
    pub steps_per_period: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct DynamicsArgs {
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Drive amplitude as A/omega.
    #[arg(long, required_unless_present = "peak", conflicts_with = "peak")]
    pub amp: Option<f64>,
    /// Use the n-th measured gap maximum (1-based).
    #[arg(long)]
    pub peak: Option<usize>,
    /// End time; defaults to 1.2 times the flip time.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Add the closed-form P_ND column.
    #[arg(long)]
    pub analytic: bool,
    /// Add Bloch vector columns.
    #[arg(long)]
    pub bloch: bool,
    /// Add the averaged-gap curve cos^2(delta' t / 2) and cos(omega t).
    #[arg(long)]
    pub rwa_reference: bool,
    #[arg(long, default_value_t = driven_tls::propagator::TLS_STEPS_PER_PERIOD)]
    pub steps_per_period: usize,
    #[arg(long, default_value_t = 256)]
    pub samples_per_period: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long)]
    pub amp_min: f64,
    #[arg(long)]
    pub amp_max: f64,
    #[arg(long)]
    pub points: usize,
    /// Skip amplitudes whose gap is below this (default 1e-3 omega).
    #[arg(long)]
    pub gap_floor: Option<f64>,
    #[arg(long, default_value_t = driven_tls::propagator::TLS_STEPS_PER_PERIOD)]
    pub steps_per_period: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisArg {
    /// Diabatic states of the crossing pair.
    Diabatic,
    /// Eigenstates at the crossing center.
    Center,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialArg {
    Diabatic0,
    Diabatic1,
    Eigen0,
    Eigen1,
}

#[derive(Debug, Args, Serialize)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["system", "synthetic"]))]
#[command(group = clap::ArgGroup::new("action").required(true).args(["static_spectrum", "find_acs", "drive", "floquet_sweep"]))]
pub struct MultilevelArgs {
    /// System description (JSON).
    #[arg(long)]
    pub system: Option<PathBuf>,
    /// `default`, or a JSON file with a synthetic crossing recipe.
    #[arg(long)]
    pub synthetic: Option<String>,

    #[arg(long)]
    pub static_spectrum: bool,
    #[arg(long)]
    pub find_acs: bool,
    #[arg(long)]
    pub drive: bool,
    #[arg(long)]
    pub floquet_sweep: bool,

    /// Field window for the static spectrum and crossing search. Required
    /// with --system; synthetic systems default to ten gaps around the
    /// crossing.
    #[arg(long, allow_negative_numbers = true)]
    pub eps_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps_max: Option<f64>,
    #[arg(long, default_value_t = 401)]
    pub eps_points: usize,
    /// Largest splitting reported as a crossing.
    #[arg(long)]
    pub max_gap: Option<f64>,

    /// Which crossing to drive, in order of field.
    #[arg(long, default_value_t = 0)]
    pub ac_index: usize,
    /// Two-level amplitude ratio A/omega.
    #[arg(long, conflicts_with = "peak")]
    pub amp: Option<f64>,
    #[arg(long)]
    pub peak: Option<usize>,
    /// Drive frequency in units of the crossing gap; a comma list for
    /// --floquet-sweep.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub omega_mult: Vec<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long, value_enum, default_value_t = BasisArg::Diabatic)]
    pub basis: BasisArg,
    #[arg(long, value_enum, default_value_t = InitialArg::Diabatic0)]
    pub initial: InitialArg,
    #[arg(long, default_value_t = 64)]
    pub sample_stride: usize,

    #[arg(long, default_value_t = 0.25)]
    pub amp_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub amp_max: f64,
    #[arg(long, default_value_t = 16)]
    pub points: usize,

    #[arg(long, default_value_t = driven_tls::propagator::MULTILEVEL_STEPS_PER_PERIOD)]
    pub steps_per_period: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write to this directory instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
