use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qlslab", version, about = "QAOA experiments for binary linear least squares")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Master seed; every task seed is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, env = "QLSLAB_OUT", default_value = "qlslab-out")]
    pub out: PathBuf,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a seeded BLLS dataset.
    GenDataset(GenDatasetArgs),
    /// Run QAOA on one instance file.
    Solve(SolveArgs),
    /// Sweep QAOA over a dataset.
    Experiment(ExperimentArgs),
    /// Simulated-annealing success fractions over a dataset.
    SaBaseline(SaArgs),
    /// Fit a growth curve to a CSV column.
    FitCurves(FitArgs),
    /// Gate counts and depth before and after routing.
    TranspileReport(TranspileArgs),
    /// Non-negative binary matrix factorization.
    Nbmf(NbmfArgs),
}

#[derive(Args, Debug)]
pub struct GenDatasetArgs {
    /// Variable counts.
    #[arg(long = "n", value_delimiter = ',', default_values_t = [3, 4, 5, 9, 10])]
    pub n_values: Vec<usize>,
    /// Instances per n.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 40)]
    pub m: usize,
    #[arg(long, default_value_t = 0.2)]
    pub density: f64,
    #[arg(long, default_value_t = 0.4)]
    pub consistent_fraction: f64,
    /// Draw b with the sparsity of A instead of dense.
    #[arg(long)]
    pub sparse_b: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Shots,
    Noisy,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Shots => "shots",
            Mode::Noisy => "noisy",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    All,
    Line,
    T,
}

impl Coupling {
    pub fn name(self) -> &'static str {
        match self {
            Coupling::All => "all",
            Coupling::Line => "line",
            Coupling::T => "t",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// Relative error of Ising energies.
    Hamiltonian,
    /// Relative error of squared residuals.
    Residual,
}

/// QAOA settings shared by `solve`, `experiment` and `nbmf`.
#[derive(Args, Debug, Clone)]
pub struct QaoaArgs {
    /// Optimizer evaluation budget per start (default 200, or 400 for p >= 3).
    #[arg(long)]
    pub budget: Option<usize>,
    /// Random starts (default 20 p).
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long, value_enum, default_value_t = Coupling::All)]
    pub coupling: Coupling,
    #[arg(long, default_value_t = 1.0)]
    pub noise_scale: f64,
    #[arg(long, value_enum, default_value_t = Reference::Hamiltonian)]
    pub reference: Reference,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Instance JSON file.
    pub instance: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Shots per evaluation in shots and noisy modes (default 2^n).
    #[arg(long)]
    pub shots: Option<u64>,
    #[command(flatten)]
    pub qaoa: QaoaArgs,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// Dataset directory written by gen-dataset.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Only instances with these n.
    #[arg(long = "n", value_delimiter = ',')]
    pub n_filter: Vec<usize>,
    /// Only the first this many instances per n.
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1])]
    pub p: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Mode::Exact])]
    pub mode: Vec<Mode>,
    /// Shot counts for shots and noisy modes (default 2^(n-2) ..= 2^(n+2)).
    #[arg(long, value_delimiter = ',')]
    pub shots: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[command(flatten)]
    pub qaoa: QaoaArgs,
}

#[derive(Args, Debug)]
pub struct SaArgs {
    /// Dataset directory; without it a fresh dataset is generated.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Variable counts when generating.
    #[arg(long = "n", value_delimiter = ',', default_values_t = [3, 4, 5, 6, 7, 8, 9, 10])]
    pub n_values: Vec<usize>,
    /// Instances per n when generating.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, default_value_t = 1000)]
    pub runs: usize,
    #[arg(long, default_value_t = 100.0)]
    pub t0: f64,
    #[arg(long, default_value_t = 0.01)]
    pub tf: f64,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    /// value = a n^b
    PowerLaw,
    /// value = 1 - (1 - a / 2^(b n))^k
    Success,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// CSV with an `n` column.
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub model: CurveKind,
    /// Column holding the values.
    #[arg(long, default_value = "success")]
    pub column: String,
    /// Keep rows where COLUMN=VALUE (repeatable).
    #[arg(long = "where", value_name = "COLUMN=VALUE")]
    pub filters: Vec<String>,
    /// Queries per attempt in the success model.
    #[arg(long, default_value_t = 10)]
    pub k: u32,
    /// Fix a = 1 in the success model.
    #[arg(long)]
    pub fix_a: bool,
    /// Fix the power-law exponent.
    #[arg(long)]
    pub fixed_b: Option<f64>,
    /// Also report the fitted curve at these n.
    #[arg(long, value_delimiter = ',')]
    pub extrapolate: Vec<usize>,
    /// Output file name inside the output directory.
    #[arg(long, default_value = "fit.json")]
    pub name: String,
}

#[derive(Args, Debug)]
pub struct TranspileArgs {
    /// Instance JSON file (default: the built-in 3-variable example).
    pub instance: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[arg(long, value_delimiter = ',')]
    pub gamma: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub beta: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Coupling::Line)]
    pub coupling: Coupling,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Brute,
    Sa,
    Qaoa,
}

#[derive(Args, Debug)]
pub struct NbmfArgs {
    /// V as CSV without header. Required unless --planted is given.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Generate a planted V = W0 H0 of shape MxNxR instead of reading one.
    #[arg(long, value_name = "MxNxR")]
    pub planted: Option<String>,
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long, value_enum, default_value_t = Backend::Brute)]
    pub backend: Backend,
    #[arg(long, default_value_t = 50)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    /// Stop at the first stall instead of restarting from a new random H.
    #[arg(long)]
    pub no_restart: bool,
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[command(flatten)]
    pub qaoa: QaoaArgs,
}
