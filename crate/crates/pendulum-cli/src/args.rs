use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pendulum_core::methods::{EvaluatorSettings, Method};
use pendulum_core::oracles::BandSide;
use pendulum_core::par::Execution;

/// Quantum pendulum propagator: kernels, Green functions, verification and
/// cross-method comparison.
///
/// CSV goes to standard output; JSON reports go to the path given by --out.
/// Numbers are printed with 15 significant digits.
#[derive(Debug, Parser)]
#[command(name = "pendulum", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the propagator κ(θa, θb; T) at a point or along a grid of final angles.
    Kernel(KernelArgs),
    /// Evaluate the Green function G(θa, θb; E) for Im E > 0.
    Green(GreenArgs),
    /// Run the verification suite for one method; exits 1 if an exact identity fails.
    Verify(VerifyArgs),
    /// Compare two methods over a grid of angles and durations; always exits 0 on success.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct PhysicsArgs {
    /// Moment of inertia μ (> 0).
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Potential strength α in V(θ) = α cos θ.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluatorArgs {
    /// Truncation tolerance used to pick l_max, k_max and r_max.
    #[arg(long, env = "PENDULUM_DEFAULT_TOL", default_value = "1e-10")]
    pub tol: f64,
    /// Momentum cutoff |L| ≤ l_max of the series methods [default: from the truncation rule at the shortest time].
    #[arg(long = "lmax")]
    pub l_max: Option<usize>,
    /// Bessel cutoff |k| ≤ k_max [default: from the truncation rule at the longest time].
    #[arg(long = "kmax")]
    pub k_max: Option<usize>,
    /// Addition-theorem cutoff for eq17 [default: from the truncation rule at the largest |t|].
    #[arg(long = "rmax")]
    pub r_max: Option<usize>,
    /// Basis cutoff of the spectral oracle [default: chosen from the band's energy].
    #[arg(long = "l-cut")]
    pub l_cut: Option<usize>,
    /// Momentum band of the regularized delta for spectral, splitstep and sliced
    /// [default: l_max when a series method takes part, otherwise 2].
    #[arg(long)]
    pub band: Option<usize>,
    /// Side on which the band limit is imposed: source or target.
    #[arg(long, default_value = "source")]
    pub band_side: BandSide,
    /// Grid points of the splitstep and sliced oracles (even, ≥ 8).
    #[arg(long, default_value_t = 128)]
    pub n_points: usize,
    /// Time steps of the splitstep oracle.
    #[arg(long, default_value_t = 4096)]
    pub n_steps: usize,
    /// Time slices of the sliced oracle.
    #[arg(long, default_value_t = 256)]
    pub n_slices: usize,
    /// Evaluate on the current thread only.
    #[arg(long)]
    pub sequential: bool,
}

impl EvaluatorArgs {
    pub fn settings(&self) -> EvaluatorSettings {
        EvaluatorSettings {
            tol: self.tol,
            l_max: self.l_max,
            k_max: self.k_max,
            r_max: self.r_max,
            l_cut: self.l_cut,
            band: self.band,
            band_side: self.band_side,
            n_points: self.n_points,
            n_steps: self.n_steps,
            n_slices: self.n_slices,
        }
    }

    pub fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct KernelArgs {
    /// One of eq16, eq17, free, spectral, splitstep, sliced.
    #[arg(long)]
    pub method: Method,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    /// Initial angle θa.
    #[arg(long, default_value_t = 0.0)]
    pub theta_a: f64,
    /// Final angle θb (ignored in grid mode).
    #[arg(long, default_value_t = 0.0)]
    pub theta_b: f64,
    /// Elapsed time T = t_b − t_a (> 0).
    #[arg(long = "T")]
    pub duration: f64,
    /// Initial time t_a (used by eq17).
    #[arg(long, default_value_t = 0.0)]
    pub t_a: f64,
    /// Evaluate at θb = 2πj/n for j = 0..n instead of a single point [default: single point].
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[command(flatten)]
    pub eval: EvaluatorArgs,
    /// Write a JSON report to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GreenMethod {
    /// Numerical time transform of a kernel.
    Transform,
    Eq27,
    Eq28,
    Eq30,
    Eq32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionChoice {
    /// Bookkeeping factors fixed by comparison with the time transform.
    Adjudicated,
    /// Every representation exactly as printed.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformKernel {
    Eq16,
    Free,
    Spectral,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct GreenArgs {
    /// Representation to evaluate.
    #[arg(long, value_enum)]
    pub method: GreenMethod,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    /// Initial angle θa.
    #[arg(long, default_value_t = 0.0)]
    pub theta_a: f64,
    /// Final angle θb.
    #[arg(long, default_value_t = 0.0)]
    pub theta_b: f64,
    /// Real part of the energy.
    #[arg(long)]
    pub e_re: f64,
    /// Imaginary part of the energy (> 0).
    #[arg(long)]
    pub e_im: f64,
    /// Momentum cutoff |L| ≤ l_max.
    #[arg(long = "lmax", default_value_t = 8)]
    pub l_max: usize,
    /// Fourier cutoff |k| ≤ k_max of the series forms.
    #[arg(long = "kmax", default_value_t = 24)]
    pub k_max: usize,
    /// Upper limit of the time transform [default: max(40, 40/Im E)].
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Starting node count of the transform, or trapezoid nodes of eq30
    /// [default: 1024 for transform, max(1024, next power of two ≥ 4·k_max + 64) for eq30].
    #[arg(long)]
    pub n_nodes: Option<usize>,
    /// Maximum terms of each inner eq27 series.
    #[arg(long, default_value_t = 200_000)]
    pub series_terms: usize,
    /// Kernel whose time transform is taken.
    #[arg(long, value_enum, default_value = "eq16")]
    pub kernel: TransformKernel,
    /// Basis cutoff of the spectral kernel for the transform.
    #[arg(long = "l-cut", default_value_t = 40)]
    pub l_cut: usize,
    /// Truncation tolerance for the transform kernel's Bessel cutoff.
    #[arg(long, env = "PENDULUM_DEFAULT_TOL", default_value = "1e-10")]
    pub tol: f64,
    /// Bookkeeping conventions of the series representations.
    #[arg(long, value_enum, default_value = "adjudicated")]
    pub conventions: ConventionChoice,
    /// Evaluate on the current thread only.
    #[arg(long)]
    pub sequential: bool,
    /// Write a JSON report to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    /// One of eq16, eq17, free, spectral, splitstep, sliced.
    #[arg(long)]
    pub method: Method,
    /// "all" or a comma-separated list of cosine-identity, schrodinger, initial-condition, semigroup.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    /// Initial angle of the probes.
    #[arg(long, default_value_t = 0.3)]
    pub theta_a: f64,
    /// Final angle of the probes.
    #[arg(long, default_value_t = 1.7)]
    pub theta_b: f64,
    /// Elapsed time of the cosine-identity and Schrödinger probes.
    #[arg(long = "T", default_value_t = 1.0)]
    pub duration: f64,
    /// Extra Bessel terms for the cosine identity (also checked at half and double).
    #[arg(long, default_value_t = 10)]
    pub k_margin: usize,
    /// Tolerance of the cosine identity.
    #[arg(long, default_value = "1e-10")]
    pub cosine_tol: f64,
    /// First finite-difference step, reduced when needed to resolve the fastest mode.
    #[arg(long, default_value_t = 1e-2)]
    pub h0: f64,
    /// Number of step halvings in the Schrödinger check (≥ 2).
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Lower end of the accepted observed Schrödinger order.
    #[arg(long, default_value_t = 1.8)]
    pub order_min: f64,
    /// Upper end of the accepted observed Schrödinger order.
    #[arg(long, default_value_t = 2.2)]
    pub order_max: f64,
    /// Times of the initial-condition check, comma-separated.
    #[arg(long, default_value = "0.5,0.25,0.125", value_delimiter = ',')]
    pub t_sequence: Vec<f64>,
    /// Quadrature points of the initial-condition and semigroup checks.
    #[arg(long, default_value_t = 256)]
    pub quad_points: usize,
    /// First split time of the semigroup check.
    #[arg(long, default_value_t = 0.4)]
    pub t1: f64,
    /// Second split time of the semigroup check.
    #[arg(long, default_value_t = 0.6)]
    pub t2: f64,
    /// Tolerance of the semigroup check.
    #[arg(long, default_value = "1e-8")]
    pub semigroup_tol: f64,
    #[command(flatten)]
    pub eval: EvaluatorArgs,
    /// Write the JSON report to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CompareArgs {
    /// First method: eq16, eq17, free, spectral, splitstep or sliced.
    #[arg(long)]
    pub a: Method,
    /// Second method.
    #[arg(long)]
    pub b: Method,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    /// Number of equally spaced initial angles on [0, 2π).
    #[arg(long, default_value_t = 8)]
    pub n_a: usize,
    /// Number of equally spaced final angles on [0, 2π).
    #[arg(long, default_value_t = 16)]
    pub n_b: usize,
    /// Durations, comma-separated.
    #[arg(long = "T", default_value = "1", value_delimiter = ',')]
    pub durations: Vec<f64>,
    /// Initial time of every query.
    #[arg(long, default_value_t = 0.0)]
    pub t_a: f64,
    #[command(flatten)]
    pub eval: EvaluatorArgs,
    /// Write the JSON report to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
