//! Non-negative binary matrix factorization `V ~ W H` by alternating least
//! squares. `W` rows come from a projected-gradient NNLS; `H` columns are BLLS
//! problems handed to a pluggable backend.

use rand::Rng as _;
use rayon::prelude::*;

use crate::baselines::{sa_run, SaConfig};
use crate::error::{Error, Result};
use crate::problem::{brute_force_solve, BllsInstance, Encoding, InstanceKind, SpinConvention};
use crate::qaoa::{run_qaoa, QaoaProblem, RunConfig};
use crate::rng::{derive_seed, rng_from_seed};

pub type Matrix = Vec<Vec<f64>>;

/// Largest rank the brute-force backend accepts.
pub const MAX_BRUTE_FORCE_RANK: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct NbmfProblem {
    pub v: Matrix,
    pub rank: usize,
    pub max_outer_iters: usize,
    /// Stop when the relative change of `||V - W H||_F` drops below this.
    pub tolerance: f64,
    pub restart_on_stall: bool,
    pub seed: u64,
}

impl NbmfProblem {
    pub fn new(v: Matrix, rank: usize, seed: u64) -> Self {
        Self {
            v,
            rank,
            max_outer_iters: 50,
            tolerance: 1e-5,
            restart_on_stall: true,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(usize, usize)> {
        let m = self.v.len();
        let n = self.v.first().map_or(0, Vec::len);
        if m == 0 || n == 0 {
            return Err(Error::Empty("V"));
        }
        if let Some(row) = self.v.iter().find(|r| r.len() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                got: row.len(),
            });
        }
        if self.v.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("V"));
        }
        if self.v.iter().flatten().any(|&x| x < 0.0) {
            return Err(Error::InvalidInstance("V has negative entries".into()));
        }
        if self.rank == 0 || self.rank > m.min(n) {
            return Err(Error::InvalidConfig(format!(
                "rank {} outside 1..={}",
                self.rank,
                m.min(n)
            )));
        }
        if self.max_outer_iters == 0 || !(self.tolerance >= 0.0) {
            return Err(Error::InvalidConfig("need max_outer_iters >= 1 and tolerance >= 0".into()));
        }
        Ok((m, n))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BllsBackend {
    BruteForce,
    SimulatedAnnealing(SaConfig<f64>),
    Qaoa(RunConfig<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbmfResult {
    pub w: Matrix,
    /// Binary, `rank x n`.
    pub h: Vec<Vec<u8>>,
    /// Best `||V - W H||_F` seen after each outer iteration.
    pub trace: Vec<f64>,
    /// `||V - W H||_F` of the current iterate after each outer iteration.
    pub raw_trace: Vec<f64>,
    pub restarts: usize,
    pub converged: bool,
}

pub fn frobenius_residual(v: &Matrix, w: &Matrix, h: &[Vec<u8>]) -> f64 {
    let mut s = 0.0;
    for (vi, wi) in v.iter().zip(w) {
        for (j, &vij) in vi.iter().enumerate() {
            let wh: f64 = wi.iter().zip(h).map(|(&wk, hk)| wk * f64::from(hk[j])).sum();
            s += (vij - wh).powi(2);
        }
    }
    s.sqrt()
}

pub fn frobenius_norm(v: &Matrix) -> f64 {
    v.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

const NNLS_ITERS: usize = 500;
const NNLS_GRAD_TOL: f64 = 1e-8;

/// `argmin_{w >= 0} ||target - basis w||`, with `basis` given by rows.
pub fn nnls_row(target: &[f64], basis: &Matrix) -> Result<Vec<f64>> {
    let r = basis.first().map_or(0, Vec::len);
    nnls_from(target, basis, vec![0.0; r])
}

fn nnls_from(target: &[f64], basis: &Matrix, mut w: Vec<f64>) -> Result<Vec<f64>> {
    if basis.len() != target.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            got: target.len(),
        });
    }
    let r = w.len();
    if let Some(row) = basis.iter().find(|row| row.len() != r) {
        return Err(Error::LengthMismatch {
            expected: r,
            got: row.len(),
        });
    }
    if target.iter().chain(basis.iter().flatten()).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("nnls input"));
    }
    let mut gram = vec![vec![0.0; r]; r];
    let mut c = vec![0.0; r];
    for (row, &t) in basis.iter().zip(target) {
        for a in 0..r {
            c[a] += row[a] * t;
            for b in 0..r {
                gram[a][b] += row[a] * row[b];
            }
        }
    }
    let lip = largest_eigenvalue(&gram);
    if lip <= 0.0 {
        return Ok(vec![0.0; r]);
    }
    let step = 1.0 / lip;
    for w_i in w.iter_mut() {
        *w_i = w_i.max(0.0);
    }
    for _ in 0..NNLS_ITERS {
        let grad: Vec<f64> = (0..r)
            .map(|a| gram[a].iter().zip(&w).map(|(g, x)| g * x).sum::<f64>() - c[a])
            .collect();
        let projected: f64 = grad
            .iter()
            .zip(&w)
            .map(|(&g, &x)| if x > 0.0 { g * g } else { g.min(0.0).powi(2) })
            .sum::<f64>()
            .sqrt();
        if projected <= NNLS_GRAD_TOL {
            break;
        }
        for (x, g) in w.iter_mut().zip(&grad) {
            *x = (*x - step * g).max(0.0);
        }
    }
    Ok(w)
}

/// Power iteration, padded slightly so `1 / L` stays a safe step.
fn largest_eigenvalue(gram: &Matrix) -> f64 {
    let r = gram.len();
    let mut x = vec![1.0; r];
    let mut lambda = 0.0;
    for _ in 0..200 {
        let y: Vec<f64> = gram
            .iter()
            .map(|row| row.iter().zip(&x).map(|(g, v)| g * v).sum())
            .collect();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm / x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = y.into_iter().map(|v| v / norm).collect();
    }
    // A trace bound caps the estimate from above for PSD matrices.
    let trace: f64 = (0..r).map(|i| gram[i][i]).sum();
    (lambda * 1.01).min(trace)
}

/// Solve one `H` column: `argmin_x ||W x - v_col||` over binary `x`.
fn solve_column(
    w: &Matrix,
    v_col: Vec<f64>,
    backend: &BllsBackend,
    seed: u64,
) -> Result<Vec<u8>> {
    let inst = BllsInstance::new(w.clone(), v_col, None, InstanceKind::Inconsistent, seed)?;
    let ising = Encoding::of(&inst).ising;
    let z = match backend {
        BllsBackend::BruteForce => brute_force_solve(&ising)?.states[0],
        BllsBackend::SimulatedAnnealing(cfg) => sa_run(&ising, &cfg.with_seed(seed))?.best_state,
        BllsBackend::Qaoa(cfg) => {
            let problem = QaoaProblem::new(ising.clone())?;
            let run = run_qaoa(&problem, &RunConfig { seed, ..cfg.clone() })?;
            run.samples
                .counts()
                .keys()
                .copied()
                .min_by(|&a, &b| ising.energy_of_index(a).total_cmp(&ising.energy_of_index(b)))
                .ok_or(Error::Empty("QAOA samples"))?
        }
    };
    Ok(SpinConvention::variables_of_index(z, w[0].len()))
}

fn column_residual(w: &Matrix, v: &Matrix, j: usize, x: &[u8]) -> f64 {
    w.iter()
        .zip(v)
        .map(|(wi, vi)| {
            let s: f64 = wi.iter().zip(x).map(|(&a, &b)| a * f64::from(b)).sum();
            (vi[j] - s).powi(2)
        })
        .sum()
}

/// Relative residual below which a stalled run counts as an exact fit.
const EXACT_FIT: f64 = 1.5e-8;

fn random_h(rng: &mut crate::rng::Rng, r: usize, n: usize) -> Vec<Vec<u8>> {
    (0..r)
        .map(|_| (0..n).map(|_| rng.gen_range(0..=1u8)).collect())
        .collect()
}

/// Alternating least squares. `H` starts uniformly random.
///
/// Each `H` column keeps its previous value unless the backend's proposal has
/// a strictly smaller residual, and each `W` row is warm-started from its
/// previous value, so within one run the objective is non-increasing whenever
/// the backend is exact.
///
/// A run has stalled when the relative change of the objective drops below
/// `tolerance`. With `restart_on_stall` set, a stalled run that is not an
/// exact fit is restarted from a fresh random `H` while outer iterations
/// remain, and the best factorization seen is returned.
pub fn nbmf_solve(p: &NbmfProblem, backend: &BllsBackend) -> Result<NbmfResult> {
    let (m, n) = p.validate()?;
    let r = p.rank;
    if matches!(backend, BllsBackend::BruteForce) && r > MAX_BRUTE_FORCE_RANK {
        return Err(Error::TooLarge {
            n: r,
            limit: MAX_BRUTE_FORCE_RANK,
        });
    }
    let v_norm = frobenius_norm(&p.v);
    let mut rng = rng_from_seed(p.seed);
    let mut h = random_h(&mut rng, r, n);
    let mut w: Matrix = vec![vec![0.0; r]; m];
    let mut best: Option<(f64, Matrix, Vec<Vec<u8>>)> = None;
    let mut trace = Vec::new();
    let mut raw_trace: Vec<f64> = Vec::new();
    let mut prev: Option<f64> = None;
    let mut restarts = 0;
    let mut converged = false;
    for iter in 0..p.max_outer_iters {
        let basis: Matrix = (0..n)
            .map(|j| (0..r).map(|k| f64::from(h[k][j])).collect())
            .collect();
        w = p
            .v
            .par_iter()
            .zip(w.par_iter())
            .map(|(vi, wi)| nnls_from(vi, &basis, wi.clone()))
            .collect::<Result<_>>()?;

        let columns: Vec<Vec<u8>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let current: Vec<u8> = (0..r).map(|k| h[k][j]).collect();
                let v_col: Vec<f64> = p.v.iter().map(|row| row[j]).collect();
                let seed = derive_seed(p.seed, &[iter as u64, j as u64]);
                let proposal = solve_column(&w, v_col, backend, seed)?;
                let keep = column_residual(&w, &p.v, j, &current)
                    <= column_residual(&w, &p.v, j, &proposal);
                Ok(if keep { current } else { proposal })
            })
            .collect::<Result<_>>()?;
        for (j, col) in columns.iter().enumerate() {
            for k in 0..r {
                h[k][j] = col[k];
            }
        }

        let obj = frobenius_residual(&p.v, &w, &h);
        raw_trace.push(obj);
        if best.as_ref().is_none_or(|b| obj < b.0) {
            best = Some((obj, w.clone(), h.clone()));
        }
        let best_obj = best.as_ref().map_or(obj, |b| b.0);
        trace.push(best_obj);

        let stalled = match prev {
            Some(prev) => prev == 0.0 || (prev - obj).abs() / prev < p.tolerance,
            None => obj == 0.0,
        };
        prev = Some(obj);
        if stalled {
            if !p.restart_on_stall || best_obj <= EXACT_FIT * v_norm {
                converged = true;
                break;
            }
            h = random_h(&mut rng, r, n);
            w = vec![vec![0.0; r]; m];
            prev = None;
            restarts += 1;
        }
    }
    let (_, w, h) = best.expect("at least one outer iteration");
    Ok(NbmfResult {
        w,
        h,
        trace,
        raw_trace,
        restarts,
        converged,
    })
}

/// Planted instance `V = W0 H0` with `W0` uniform on `[0, 1)` and `H0` binary
/// with no all-zero column.
pub fn planted_instance(m: usize, n: usize, r: usize, seed: u64) -> (Matrix, Matrix, Vec<Vec<u8>>) {
    let mut rng = rng_from_seed(seed);
    let w0: Matrix = (0..m)
        .map(|_| (0..r).map(|_| rng.gen_range(0.0..1.0)).collect())
        .collect();
    let mut h0: Vec<Vec<u8>> = vec![vec![0; n]; r];
    for j in 0..n {
        loop {
            let col: Vec<u8> = (0..r).map(|_| rng.gen_range(0..=1u8)).collect();
            if col.iter().any(|&b| b == 1) {
                for k in 0..r {
                    h0[k][j] = col[k];
                }
                break;
            }
        }
    }
    let v: Matrix = w0
        .iter()
        .map(|wi| {
            (0..n)
                .map(|j| wi.iter().zip(&h0).map(|(&a, hk)| a * f64::from(hk[j])).sum())
                .collect()
        })
        .collect();
    (v, w0, h0)
}
