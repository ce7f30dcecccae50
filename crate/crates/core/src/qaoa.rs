//! The variational loop: angle parameters, backend modes, objective
//! evaluation and multi-start optimization of a QAOA circuit.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::analysis::relative_error;
use crate::circuit::{build_qaoa_circuit, route, BuildOptions, Circuit, CouplingMap};
use crate::error::{Error, Result};
use crate::optimizer::{multi_start_minimize, BoxBounds, OptimizationResult, OptimizerConfig};
use crate::problem::{brute_force_solve, GroundStates, IsingProblem};
use crate::rng::derive_seed;
use crate::scalar::Real;
use crate::simulator::{
    expectation_from_samples, sample, simulate_noisy, FastQaoa, NoiseModel, SampleSet,
    StateVector,
};

/// Angles for `p` layers. Flattened as `[gamma_1..gamma_p, beta_1..beta_p]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams<T> {
    pub gamma: Vec<T>,
    pub beta: Vec<T>,
}

impl<T: Real> QaoaParams<T> {
    pub fn new(gamma: Vec<T>, beta: Vec<T>) -> Result<Self> {
        if gamma.is_empty() {
            return Err(Error::InvalidConfig("QAOA needs at least one layer".into()));
        }
        if gamma.len() != beta.len() {
            return Err(Error::LengthMismatch {
                expected: gamma.len(),
                got: beta.len(),
            });
        }
        if gamma.iter().chain(&beta).any(|a| !a.is_finite()) {
            return Err(Error::AngleOutOfBounds("non-finite angle".into()));
        }
        Ok(Self { gamma, beta })
    }

    pub fn p(&self) -> usize {
        self.gamma.len()
    }

    pub fn from_flat(x: &[T]) -> Result<Self> {
        if x.len() % 2 != 0 {
            return Err(Error::LengthMismatch {
                expected: x.len() + 1,
                got: x.len(),
            });
        }
        let p = x.len() / 2;
        Self::new(x[..p].to_vec(), x[p..].to_vec())
    }

    pub fn to_flat(&self) -> Vec<T> {
        self.gamma.iter().chain(&self.beta).copied().collect()
    }

    /// `gamma in [0, 2pi]`, `beta in [0, pi]`.
    pub fn bounds(p: usize) -> Result<BoxBounds<T>> {
        let lower = vec![T::zero(); 2 * p];
        let mut upper = vec![T::TAU(); p];
        upper.extend(std::iter::repeat_n(T::PI(), p));
        BoxBounds::new(lower, upper)
    }

    pub fn check_bounds(&self) -> Result<()> {
        let tau = T::TAU();
        let pi = T::PI();
        if let Some(g) = self.gamma.iter().find(|&&g| !(g >= T::zero() && g <= tau)) {
            return Err(Error::AngleOutOfBounds(format!("gamma = {g} not in [0, 2pi]")));
        }
        if let Some(b) = self.beta.iter().find(|&&b| !(b >= T::zero() && b <= pi)) {
            return Err(Error::AngleOutOfBounds(format!("beta = {b} not in [0, pi]")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BackendMode {
    ExactStatevector,
    ShotSampling {
        shots: u64,
    },
    Noisy {
        noise: NoiseModel,
        shots: u64,
        coupling: CouplingMap,
    },
}

impl BackendMode {
    pub fn name(&self) -> &'static str {
        match self {
            BackendMode::ExactStatevector => "exact",
            BackendMode::ShotSampling { .. } => "shots",
            BackendMode::Noisy { .. } => "noisy",
        }
    }

    pub fn shots(&self) -> Option<u64> {
        match self {
            BackendMode::ExactStatevector => None,
            BackendMode::ShotSampling { shots } | BackendMode::Noisy { shots, .. } => Some(*shots),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            BackendMode::ExactStatevector => Ok(()),
            BackendMode::ShotSampling { shots } => check_shots(*shots),
            BackendMode::Noisy { noise, shots, .. } => {
                check_shots(*shots)?;
                noise.validate()
            }
        }
    }
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        Err(Error::InvalidConfig("shots must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// An Ising problem prepared for repeated QAOA evaluation.
#[derive(Debug, Clone)]
pub struct QaoaProblem<T> {
    ising: IsingProblem<T>,
    fast: FastQaoa<T>,
    ground: GroundStates<T>,
}

impl<T: Real> QaoaProblem<T> {
    pub fn new(ising: IsingProblem<T>) -> Result<Self> {
        let fast = FastQaoa::new(&ising)?;
        let ground = brute_force_solve(&ising)?;
        Ok(Self {
            ising,
            fast,
            ground,
        })
    }

    pub fn ising(&self) -> &IsingProblem<T> {
        &self.ising
    }

    pub fn ground(&self) -> &GroundStates<T> {
        &self.ground
    }

    pub fn num_qubits(&self) -> usize {
        self.ising.num_spins()
    }

    pub fn state(&self, params: &QaoaParams<T>) -> StateVector<T> {
        self.fast.state(params)
    }

    pub fn exact_expectation(&self, params: &QaoaParams<T>) -> T {
        self.fast.expectation(params)
    }

    pub fn success_probability(&self, params: &QaoaParams<T>) -> T {
        let probs = self.state(params).probabilities();
        self.ground.states.iter().map(|&z| probs[z]).sum()
    }

    /// Circuit executed by the noisy backend: built, routed, SWAPs expanded.
    pub fn device_circuit(
        &self,
        params: &QaoaParams<T>,
        coupling: &CouplingMap,
    ) -> Result<Circuit<T>> {
        let opts = BuildOptions {
            allow_out_of_range: true,
            drop_below: None,
        };
        let c = build_qaoa_circuit(&self.ising, params, &opts)?;
        Ok(route(&c, coupling)?.expand_swaps())
    }

    /// Measurements of the prepared state under `mode`.
    pub fn measure(&self, params: &QaoaParams<T>, mode: &BackendMode, shots: u64, seed: u64) -> Result<SampleSet> {
        match mode {
            BackendMode::ExactStatevector | BackendMode::ShotSampling { .. } => {
                sample(&self.state(params), shots, seed)
            }
            BackendMode::Noisy {
                noise, coupling, ..
            } => simulate_noisy(&self.device_circuit(params, coupling)?, noise, shots, seed),
        }
    }

    /// Objective value seen by the optimizer.
    pub fn objective(&self, params: &QaoaParams<T>, mode: &BackendMode, seed: u64) -> Result<T> {
        mode.validate()?;
        match mode {
            BackendMode::ExactStatevector => Ok(self.exact_expectation(params)),
            BackendMode::ShotSampling { shots } | BackendMode::Noisy { shots, .. } => {
                expectation_from_samples(&self.ising, &self.measure(params, mode, *shots, seed)?)
            }
        }
    }
}

/// One-off objective evaluation. Prefer [`QaoaProblem::objective`] in loops.
pub fn objective<T: Real>(
    p: &IsingProblem<T>,
    params: &QaoaParams<T>,
    mode: &BackendMode,
    seed: u64,
) -> Result<T> {
    QaoaProblem::new(p.clone())?.objective(params, mode, seed)
}

/// Total probability of the ground-state bitstrings in the exact QAOA state.
pub fn success_probability<T: Real>(p: &IsingProblem<T>, params: &QaoaParams<T>) -> Result<T> {
    Ok(QaoaProblem::new(p.clone())?.success_probability(params))
}

/// Which energy scale the relative error is measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorReference {
    /// Cost-Hamiltonian energies, offset excluded.
    #[default]
    Hamiltonian,
    /// Energies shifted by `shift` (offset plus QUBO constant), i.e. residuals.
    Residual,
}

/// Starts per layer count used for full-size runs.
pub fn default_starts(p: usize) -> usize {
    20 * p
}

pub fn default_budget(p: usize) -> usize {
    if p >= 3 {
        400
    } else {
        200
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig<T> {
    pub p: usize,
    pub mode: BackendMode,
    pub optimizer: OptimizerConfig<T>,
    pub n_starts: usize,
    pub seed: u64,
    /// Shots drawn from the final state for the reported counts.
    pub final_shots: u64,
    pub reference: ErrorReference,
    /// Added to both energies when `reference` is `Residual`.
    pub residual_shift: T,
}

impl<T: Real> RunConfig<T> {
    pub fn new(p: usize, mode: BackendMode, seed: u64) -> Self {
        Self {
            p,
            optimizer: OptimizerConfig::with_budget(default_budget(p)),
            n_starts: default_starts(p),
            final_shots: mode.shots().unwrap_or(1024),
            mode,
            seed,
            reference: ErrorReference::Hamiltonian,
            residual_shift: T::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QaoaRun<T> {
    pub params: QaoaParams<T>,
    /// Best objective value seen by the optimizer (mode-dependent).
    pub optimizer_value: T,
    /// Statevector expectation at the final angles.
    pub exact_expectation: T,
    pub ground_energy: T,
    pub n_ground: usize,
    /// `None` when the reference ground energy is zero.
    pub rel_error: Option<T>,
    pub success_prob: T,
    pub samples: SampleSet,
    pub best_sampled_energy: T,
    pub ground_hits: u64,
    pub optimization: OptimizationResult<T>,
}

/// Multi-start optimization of the `2p` angles, followed by exact
/// re-evaluation at the winning angles and a final measurement batch.
pub fn run_qaoa<T: Real>(problem: &QaoaProblem<T>, cfg: &RunConfig<T>) -> Result<QaoaRun<T>> {
    cfg.mode.validate()?;
    if cfg.p == 0 {
        return Err(Error::InvalidConfig("p must be at least 1".into()));
    }
    if let BackendMode::Noisy { coupling, .. } = &cfg.mode {
        if coupling.n_physical() < problem.num_qubits() {
            return Err(Error::InvalidCouplingMap(format!(
                "{} physical qubits for {} logical",
                coupling.n_physical(),
                problem.num_qubits()
            )));
        }
    }
    let bounds = QaoaParams::<T>::bounds(cfg.p)?;
    let mode = &cfg.mode;
    let opt = multi_start_minimize(
        |x: &[T], rng: &mut crate::rng::Rng| {
            let params = QaoaParams::from_flat(x).expect("dimension fixed by bounds");
            problem
                .objective(&params, mode, rng.gen())
                .unwrap_or(T::infinity())
        },
        &bounds,
        &cfg.optimizer,
        cfg.n_starts,
        cfg.seed,
    )?;
    let params = QaoaParams::from_flat(&opt.best_point)?;
    let exact_expectation = problem.exact_expectation(&params);
    let ground_energy = problem.ground().energy;
    let shift = match cfg.reference {
        ErrorReference::Hamiltonian => T::zero(),
        ErrorReference::Residual => cfg.residual_shift,
    };
    let rel_error = relative_error(exact_expectation + shift, ground_energy + shift).ok();
    let samples = problem.measure(
        &params,
        mode,
        cfg.final_shots.max(1),
        derive_seed(cfg.seed, &[u64::MAX]),
    )?;
    let best_sampled_energy = samples
        .best_energy(problem.ising())
        .expect("final sample set is non-empty");
    let ground_hits = problem.ground().states.iter().map(|&z| samples.count(z)).sum();
    Ok(QaoaRun {
        success_prob: problem.success_probability(&params),
        optimizer_value: opt.best_value,
        exact_expectation,
        ground_energy,
        n_ground: problem.ground().count(),
        rel_error,
        samples,
        best_sampled_energy,
        ground_hits,
        params,
        optimization: opt,
    })
}

/// Serializable summary of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub n: usize,
    pub p: usize,
    pub mode: String,
    pub shots: Option<u64>,
    pub seed: u64,
    pub best_gamma: Vec<f64>,
    pub best_beta: Vec<f64>,
    pub exact_expectation: f64,
    pub ground_energy: f64,
    pub rel_error: Option<f64>,
    pub success_prob: f64,
    pub best_sampled_energy: f64,
    pub ground_hits: u64,
    pub final_shots: u64,
    pub trace_csv_path: Option<String>,
}

impl RunRecord {
    pub fn from_run<T: Real>(
        instance_id: impl Into<String>,
        cfg: &RunConfig<T>,
        run: &QaoaRun<T>,
        trace_csv_path: Option<String>,
    ) -> Self {
        Self {
            instance_id: instance_id.into(),
            n: run.samples.num_qubits(),
            p: cfg.p,
            mode: cfg.mode.name().to_string(),
            shots: cfg.mode.shots(),
            seed: cfg.seed,
            best_gamma: run.params.gamma.iter().map(|v| v.as_f64()).collect(),
            best_beta: run.params.beta.iter().map(|v| v.as_f64()).collect(),
            exact_expectation: run.exact_expectation.as_f64(),
            ground_energy: run.ground_energy.as_f64(),
            rel_error: run.rel_error.map(|v| v.as_f64()),
            success_prob: run.success_prob.as_f64(),
            best_sampled_energy: run.best_sampled_energy.as_f64(),
            ground_hits: run.ground_hits,
            final_shots: run.samples.shots(),
            trace_csv_path,
        }
    }
}

/// Trace as CSV text: header `eval_index,value`.
pub fn trace_csv<T: Real>(trace: &[(usize, T)]) -> String {
    let mut s = String::from("eval_index,value\n");
    for (i, v) in trace {
        s.push_str(&format!("{i},{:?}\n", v.as_f64()));
    }
    s
}
