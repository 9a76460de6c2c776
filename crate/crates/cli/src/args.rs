//! Flag definitions. Every long flag doubles as a config key; the help
//! heading of a flag names its config section.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "gevrey-nse",
    version,
    about = "Analyticity and attractor diagnostics for the 2D periodic Navier-Stokes equations",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the recursive bound chain and print the full bound set.
    Constants(ConstantsArgs),
    /// Taylor series in the conformal disk and the zero-in-attractor verdict.
    Criterion(CriterionArgs),
    /// Closed-form resolution for a Stokes eigenfunction force.
    Kolmogorov(KolmogorovArgs),
    /// IFRK4 integration along a real or complex time ray.
    Simulate(SimulateArgs),
    /// Gevrey-class certificates, inclusions and inequality audits for a field.
    GevreyDiag(DiagArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Constants(_) => "constants",
            Self::Criterion(_) => "criterion",
            Self::Kolmogorov(_) => "kolmogorov",
            Self::Simulate(_) => "simulate",
            Self::GevreyDiag(_) => "gevrey-diag",
        }
    }

    pub fn output(&self) -> &OutputArgs {
        match self {
            Self::Constants(a) => &a.output,
            Self::Criterion(a) => &a.output,
            Self::Kolmogorov(a) => &a.output,
            Self::Simulate(a) => &a.output,
            Self::GevreyDiag(a) => &a.output,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output directory, created if missing.
    #[arg(long, default_value = "out", help_heading = "output")]
    pub out: PathBuf,
    /// Seed for every random generator of the run.
    #[arg(long, default_value_t = 0, help_heading = "output")]
    pub seed: u64,
    /// Flat key=value config file; flags given on the command line win.
    #[arg(long, help_heading = "output")]
    pub config: Option<PathBuf>,
    /// Suppress the stdout report.
    #[arg(long, help_heading = "output")]
    pub quiet: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ForceKind {
    /// g = 0.
    Zero,
    /// Single Stokes eigenfunction at `--k` with `|g| = --amplitude`.
    Kolmogorov,
    /// Seeded sparse random force with `|g| = --amplitude`.
    Random,
    /// Snapshot read from `--force-file`; its grid replaces `--K`, `--kappa0`.
    File,
}

#[derive(Args, Debug, Clone)]
pub struct ForceArgs {
    #[arg(long, value_enum, default_value_t = ForceKind::Kolmogorov, help_heading = "force")]
    pub force: ForceKind,
    #[arg(long, help_heading = "force")]
    pub force_file: Option<PathBuf>,
    /// Wavevector of the eigenfunction force.
    #[arg(long, num_args = 2, value_names = ["K1", "K2"], default_values_t = [1, 0],
          allow_negative_numbers = true, help_heading = "force")]
    pub k: Vec<i32>,
    #[arg(long, default_value_t = 1.0, help_heading = "force")]
    pub amplitude: f64,
    /// Conjugate mode pairs in the random force.
    #[arg(long, default_value_t = 5, help_heading = "force")]
    pub force_modes: usize,
    /// Random force modes satisfy `|k|_inf <= force-max-mode`.
    #[arg(long, default_value_t = 3, help_heading = "force")]
    pub force_max_mode: usize,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Truncation `|k|_inf <= K`.
    #[arg(long = "K", default_value_t = 16, help_heading = "grid")]
    pub k_max: usize,
    #[arg(long, default_value_t = 1.0, help_heading = "grid")]
    pub kappa0: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Fft,
    Direct,
}

impl From<BackendArg> for gevrey_nse::bilinear::Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Fft => Self::Fft,
            BackendArg::Direct => Self::Direct,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ChainArgs {
    #[arg(long = "c-l", default_value_t = 1.0, help_heading = "constants")]
    pub c_l: f64,
    #[arg(long = "c-a", default_value_t = 1.0, help_heading = "constants")]
    pub c_a: f64,
    #[arg(long, default_value_t = 40, help_heading = "constants")]
    pub gamma_max: usize,
    /// Largest admitted truncation tail of the C1, C2 products.
    #[arg(long, default_value_t = 1e-8, help_heading = "constants")]
    pub tol: f64,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["G", "g_file"])))]
pub struct ConstantsArgs {
    /// Grashof number `|g| / (nu^2 kappa0^2)`.
    #[arg(long = "G", id = "G", help_heading = "flow")]
    pub grashof: Option<f64>,
    /// Force snapshot; G and kappa0 are taken from it.
    #[arg(long, help_heading = "flow")]
    pub g_file: Option<PathBuf>,
    #[arg(long, help_heading = "flow")]
    pub nu: f64,
    #[arg(long, default_value_t = 1.0, help_heading = "flow")]
    pub kappa0: f64,
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Gevrey exponent for the strip bound; omitted: no strip bound.
    #[arg(long, help_heading = "strip")]
    pub b: Option<f64>,
    /// Strip half-width; defaults to delta3.
    #[arg(long, help_heading = "strip")]
    pub delta: Option<f64>,
    /// `|A^{-1/2} E^b g|`, needed with `--G` (computed from `--g-file`).
    #[arg(long, help_heading = "strip")]
    pub g_weighted: Option<f64>,
    /// Class constant c0 of the force's Gevrey certificate.
    #[arg(long, default_value_t = 1.0, help_heading = "strip")]
    pub c0: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CriterionArgs {
    #[command(flatten)]
    pub force: ForceArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1.0, help_heading = "flow")]
    pub nu: f64,
    /// Strip half-width; defaults to delta3 of the force.
    #[arg(long, help_heading = "criterion")]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 0.0, help_heading = "criterion")]
    pub b: f64,
    /// Highest Taylor coefficient.
    #[arg(long = "N", default_value_t = 64, help_heading = "criterion")]
    pub n: usize,
    /// Bound on `|u|_b` in the strip; defaults to `R~_new nu`.
    #[arg(long = "M", help_heading = "criterion")]
    pub m: Option<f64>,
    #[arg(long, default_value_t = 1.0, help_heading = "criterion")]
    pub c0: f64,
    #[arg(long, default_value_t = gevrey_nse::taylor::DEFAULT_MARGIN, help_heading = "criterion")]
    pub margin: f64,
    #[arg(long, value_enum, default_value_t = BackendArg::Fft, help_heading = "criterion")]
    pub backend: BackendArg,
    /// Write every `U_n` as a field snapshot.
    #[arg(long, help_heading = "criterion")]
    pub snapshots: bool,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct KolmogorovArgs {
    #[arg(long, num_args = 2, value_names = ["K1", "K2"], default_values_t = [1, 0],
          allow_negative_numbers = true, help_heading = "force")]
    pub k: Vec<i32>,
    #[arg(long, default_value_t = 1.0, help_heading = "force")]
    pub amplitude: f64,
    #[arg(long, help_heading = "flow")]
    pub nu: f64,
    #[arg(long, default_value_t = 1.0, help_heading = "grid")]
    pub kappa0: f64,
    /// Truncation; defaults to the smallest grid holding `k`.
    #[arg(long = "K", help_heading = "grid")]
    pub k_max: Option<usize>,
    #[arg(long, default_value_t = 0.1, help_heading = "criterion")]
    pub delta: f64,
    #[arg(long = "N", default_value_t = 100, help_heading = "criterion")]
    pub n: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum InitKind {
    Zero,
    /// Random real field with `|k|_inf <= init-max-mode`.
    Random,
    File,
}

#[derive(Args, Debug, Clone)]
pub struct IntegratorArgs {
    #[arg(long, default_value_t = 1e-3, help_heading = "integrator")]
    pub dt: f64,
    /// Ray angle in `[-pi/4, pi/4]`.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, help_heading = "integrator")]
    pub theta: f64,
    #[arg(long, default_value_t = 1.0, help_heading = "integrator")]
    pub t_end: f64,
    /// Exponent of the `|u|_b` diagnostic.
    #[arg(long, default_value_t = 0.0, help_heading = "integrator")]
    pub b: f64,
    #[arg(long, value_enum, default_value_t = BackendArg::Fft, help_heading = "integrator")]
    pub backend: BackendArg,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub force: ForceArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1.0, help_heading = "flow")]
    pub nu: f64,
    #[arg(long, value_enum, default_value_t = InitKind::Random, help_heading = "init")]
    pub init: InitKind,
    #[arg(long, help_heading = "init")]
    pub init_file: Option<PathBuf>,
    /// Component bound for the random start; defaults to `nu kappa0`.
    #[arg(long, help_heading = "init")]
    pub init_amplitude: Option<f64>,
    #[arg(long, default_value_t = 4, help_heading = "init")]
    pub init_max_mode: usize,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    /// Write a snapshot every this many steps (0: final state only).
    #[arg(long, default_value_t = 0, help_heading = "integrator")]
    pub snapshot_every: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FieldSource {
    /// Seeded random real field.
    Random,
    /// Snapshot read from `--field`.
    File,
    /// Ensemble run past a transient under the configured force.
    Attractor,
}

#[derive(Args, Debug)]
pub struct DiagArgs {
    #[arg(long, value_enum, default_value_t = FieldSource::Random, help_heading = "field")]
    pub source: FieldSource,
    #[arg(long, help_heading = "field")]
    pub field: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0, help_heading = "field")]
    pub field_amplitude: f64,
    #[arg(long, default_value_t = 4, help_heading = "field")]
    pub field_max_mode: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1.0, help_heading = "flow")]
    pub nu: f64,
    #[arg(long, default_value_t = 12, help_heading = "gevrey")]
    pub alpha_max: usize,
    /// Certify against this sigma instead of the fitted one.
    #[arg(long, help_heading = "gevrey")]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = 1.0, help_heading = "gevrey")]
    pub epsilon: f64,
    /// Exponent for the `|A^{1/2} E^b u|` check and the ray profile;
    /// defaults to `1 / (64 sigma)` capped at 1.
    #[arg(long = "check-b", help_heading = "gevrey")]
    pub check_b: Option<f64>,
    /// Takes the check exponent from `beta3` when `--check-b` is unset.
    #[arg(long, help_heading = "gevrey")]
    pub beta3: Option<f64>,
    /// Which `beta3` exponent to use: `1 / (160 ln beta3)` or `1 / (96 ln beta3)`.
    #[arg(long, value_enum, default_value_t = Beta3Rule::Force, help_heading = "gevrey")]
    pub beta3_rule: Beta3Rule,
    /// Exponents of the weight sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0],
          help_heading = "gevrey")]
    pub b_values: Vec<f64>,
    /// Points per axis for the inequality audit.
    #[arg(long, default_value_t = 64, help_heading = "gevrey")]
    pub resolution: usize,
    #[command(flatten)]
    pub force: ForceArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, default_value_t = 1e-3, help_heading = "ensemble")]
    pub dt: f64,
    #[arg(long, value_enum, default_value_t = BackendArg::Fft, help_heading = "ensemble")]
    pub backend: BackendArg,
    #[arg(long, default_value_t = 4, help_heading = "ensemble")]
    pub members: usize,
    #[arg(long, default_value_t = 10.0, help_heading = "ensemble")]
    pub t_transient: f64,
    #[arg(long, default_value_t = 1.0, help_heading = "ensemble")]
    pub t_sample: f64,
    #[arg(long, default_value_t = 4, help_heading = "ensemble")]
    pub samples_per_member: usize,
    /// Strip half-width for the ray profile; defaults to delta3.
    #[arg(long, help_heading = "ensemble")]
    pub delta: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Beta3Rule {
    /// `1 / (160 ln beta3)`, the exponent reached by the force.
    Force,
    /// `1 / (96 ln beta3)`, the exponent used for solutions.
    Solution,
}
