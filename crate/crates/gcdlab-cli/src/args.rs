//! Command-line surface. Every subcommand's argument struct round-trips
//! through serde so that reports echo their configuration and
//! `selftest --from-report` can re-execute a report from its own echo.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::report::Format;

#[derive(Parser)]
#[command(
    name = "gcdlab",
    about = "Exact desk-scale experiments on GCD sums, GCD matrices, and dilated sawtooth systems",
    long_about = "Exact desk-scale experiments on GCD sums, GCD matrices, and dilated sawtooth \
                  systems.\n\nConventions: all logarithms are natural and [.] denotes floor. \
                  Reports are deterministic for a fixed configuration in json/csv formats; all \
                  randomness derives from --seed (Monte Carlo shard s uses stream s of the seeded \
                  generator)."
)]
pub struct Cli {
    /// Output format (json is canonical; csv is a flat projection).
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,

    /// Seed for every randomized path; always recorded in the report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (0 = library default). Overrides GCDLAB_PARALLELISM.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Factor an integer into its prime-position exponent map.
    Factorize(FactorizeArgs),
    /// Evaluate the GCD sum of a sequence, cross-checked against S(t, B).
    Gcdsum(GcdsumArgs),
    /// Evaluate a named extremal family (and its closed form, when one exists).
    Extremal(ExtremalArgs),
    /// Run the canonical reduction on an index set.
    Reduce(ReduceArgs),
    /// Build a GCD matrix and compute its extreme eigenvalues and bounds.
    Spectral(SpectralArgs),
    /// Check the Poisson-integral identity by quadrature or Monte Carlo.
    VerifyPoisson(VerifyPoissonArgs),
    /// Tabulate the named closed-form bounds against an extremal family.
    Bounds(BoundsArgs),
    /// Evaluate a Koksma resonance sum with a brute-force cross-check.
    Resonance(ResonanceArgs),
    /// Exact L2 norm of the maximal partial-sum operator of a system.
    Maximal(MaximalArgs),
    /// The Carleson-Hunt ratio experiment row for a system.
    ChRatio(ChRatioArgs),
    /// Run the invariant battery, or re-validate a previously written report.
    Selftest(SelftestArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Factorize(_) => "factorize",
            Command::Gcdsum(_) => "gcdsum",
            Command::Extremal(_) => "extremal",
            Command::Reduce(_) => "reduce",
            Command::Spectral(_) => "spectral",
            Command::VerifyPoisson(_) => "verify-poisson",
            Command::Bounds(_) => "bounds",
            Command::Resonance(_) => "resonance",
            Command::Maximal(_) => "maximal",
            Command::ChRatio(_) => "ch-ratio",
            Command::Selftest(_) => "selftest",
        }
    }
}

#[derive(Clone, Args, Serialize, Deserialize)]
pub struct FactorizeArgs {
    /// The integer to factorize (>= 1).
    pub n: u64,
}

#[derive(Clone, Args, Serialize, Deserialize)]
pub struct GcdsumArgs {
    /// Exponent alpha in (0, 1].
    #[arg(long)]
    pub alpha: f64,
    /// Inline sequence, comma-separated (e.g. 1,2,3,6).
    #[arg(long, conflicts_with = "seq_file")]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seq: Option<String>,
    /// Sequence file: one positive integer per line.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seq_file: Option<PathBuf>,
    /// Divide the double sum by N.
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    pub normalized: bool,
    /// Skip the factorization-route cross-check.
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    pub skip_s_form: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Squarefree,
    Primes,
    Integers,
}

#[derive(Clone, Args, Serialize, Deserialize)]
pub struct ExtremalArgs {
    /// Which family: squarefree (2^r subset products), primes, or integers.
    #[arg(long, value_enum)]
    pub kind: FamilyKind,
    /// Number of primes r for the squarefree family.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<u32>,
    /// Family size N for primes / integers.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<u64>,
    /// Exponent alpha in (0, 1].
    #[arg(long)]
    pub alpha: f64,
    /// Report the normalized sum instead of the total.
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    pub normalized: bool,
}

#[derive(Clone, Args, Serialize, Deserialize)]
pub struct ReduceArgs {
    /// Index-set file: JSON array of {"position": exponent} maps.
    #[arg(long)]
    pub set_file: PathBuf,
    /// Power-law weights p_j^{-alpha}.
    #[arg(long, conflicts_with = "weights_file")]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    /// Explicit weight file: one decimal in (0,1) per line, decreasing.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weights_file: Option<PathBuf>,
}

#[derive(Clone, Args, Serialize, Deserialize)]
pub struct SpectralArgs {
    /// Inline sequence, comma-separated.
    #[arg(long, conflicts_with_all = ["seq_file", "set_file"])]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seq: Option<String>,
    /// Sequence file: one positive integer per line.
    #[arg(long, conflicts_with = "set_file")]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seq_file: Option<PathBuf>,
    /// Index-set file: JSON array of {"position": exponent} maps.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub set_file: Option<PathBuf>,
    /// Power-law weights p_j^{-alpha} (required for integer inputs).
    #[arg(long, conflicts_with = "weights_file")]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    /// Explicit weight file (index-set inputs only).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weights_file: Option<PathBuf>,
    /// Eigensolver certificate tolerance.
    #[arg(long, default_value_t = 1e-10)]
    #[serde(default = "default_eig_tol")]
    pub tol: f64,
    /// Export the matrix as CSV (row-major, full symmetric storage).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub export_matrix: Option<PathBuf>,
}

fn default_eig_tol() -> f64 {
    1e-10
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoissonMethod {
    Grid,
    Mc,
}

#[derive(Clone, Args, Serialize, Deserialize)]
pub struct VerifyPoissonArgs {
    /// Inline sequence to factorize into the index set.
    #[arg(long, conflicts_with = "set_file")]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seq: Option<String>,
    /// Index-set file: JSON array of {"position": exponent} maps.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub set_file: Option<PathBuf>,
    /// Power-law weights p_j^{-alpha}.
    #[arg(long, conflicts_with = "weights_file")]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    /// Explicit weight file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weights_file: Option<PathBuf>,
    /// Coefficients, comma-separated; defaults to all ones.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coeffs: Option<String>,
    /// grid (tensor trapezoid with doubling) or mc (seeded Monte Carlo).
    #[arg(long, value_enum, default_value = "grid")]
    #[serde(default = "default_method")]
    pub method: PoissonMethod,
    /// Starting points per dimension for the grid method.
    #[arg(long, default_value_t = 16)]
    #[serde(default = "default_points")]
    pub points: usize,
    /// Relative agreement budget for the grid method.
    #[arg(long, default_value_t = 1e-8)]
    #[serde(default = "default_budget")]
    pub budget: f64,
    /// Sample count for the mc method.
    #[arg(long, default_value_t = 1_000_000)]
    #[serde(default = "default_samples")]
    pub samples: u64,
}

fn default_method() -> PoissonMethod {
    PoissonMethod::Grid
}
fn default_points() -> usize {
    16
}
fn default_budget() -> f64 {
    1e-8
}
fn default_samples() -> u64 {
    1_000_000
}

#[derive(Clone, Args, Serialize, Deserialize)]
pub struct BoundsArgs {
    /// Alphas in (0, 1), comma-separated.
    #[arg(long)]
    pub alpha: String,
    /// Family whose observed normalized sum fills the extremal_value column.
    #[arg(long, value_enum, default_value = "squarefree")]
    #[serde(default = "default_family")]
    pub family: FamilyKind,
    /// Sizes, comma-separated: r values for squarefree, N values otherwise.
    #[arg(long)]
    pub sizes: String,
    /// Constant C of the Dyer-Harman bound.
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "default_one")]
    pub c_big: f64,
    /// Constant c of the Gal and Dyer-Harman bounds.
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "default_one")]
    pub c_small: f64,
}

fn default_family() -> FamilyKind {
    FamilyKind::Squarefree
}
fn default_one() -> f64 {
    1.0
}

#[derive(Clone, Args, Serialize, Deserialize)]
pub struct ResonanceArgs {
    /// Smaller frequency v >= 1.
    #[arg(long)]
    pub v: u64,
    /// Larger frequency w >= v.
    #[arg(long)]
    pub w: u64,
    /// Both indices start at J + 1.
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub j: u64,
    /// Summand exponent s > 1/2 ((j1 j2)^{-s}).
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "default_one")]
    pub s: f64,
}

#[derive(Clone, Args, Serialize, Deserialize)]
pub struct MaximalArgs {
    /// System file: two whitespace-separated columns n_k c_k.
    #[arg(long, conflicts_with_all = ["seq", "coeffs"])]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub system_file: Option<PathBuf>,
    /// Inline frequencies, comma-separated.
    #[arg(long, requires = "coeffs")]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seq: Option<String>,
    /// Inline coefficients, comma-separated.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coeffs: Option<String>,
}

#[derive(Clone, Args, Serialize, Deserialize)]
pub struct ChRatioArgs {
    /// System file: two whitespace-separated columns n_k c_k.
    #[arg(long, conflicts_with_all = ["seq", "coeffs"])]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub system_file: Option<PathBuf>,
    /// Inline frequencies, comma-separated.
    #[arg(long, requires = "coeffs")]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seq: Option<String>,
    /// Inline coefficients, comma-separated.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coeffs: Option<String>,
}

#[derive(Clone, Args, Serialize, Deserialize)]
pub struct SelftestArgs {
    /// Re-parse a report and re-validate it by re-executing its config.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub from_report: Option<PathBuf>,
}
