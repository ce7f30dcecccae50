//! Bounded derivative-free minimization by implicit filtering.
//!
//! At each stencil scale `h` (a fraction of the box width) the method samples
//! the central-difference coordinate stencil around the current point, forms
//! the stencil gradient and tries a projected descent step, halving it up to
//! five times. It keeps the better of the line-search point and the best
//! stencil point. When no stencil point improves on the centre the stencil
//! has failed and the scale shrinks. Runs stop when the scales or the
//! evaluation budget run out.

use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Real> BoxBounds<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::LengthMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::Empty("bounds"));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| !(l.is_finite() && u.is_finite() && l < u))
        {
            return Err(Error::InvalidConfig("bounds need finite lower < upper".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn width(&self, i: usize) -> T {
        self.upper[i] - self.lower[i]
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| l <= v && v <= u)
    }

    pub fn clip(&self, i: usize, v: T) -> T {
        v.max(self.lower[i]).min(self.upper[i])
    }

    pub fn sample_uniform(&self, rng: &mut Rng) -> Vec<T> {
        (0..self.dim())
            .map(|i| self.lower[i] + self.width(i) * T::lit(rng.gen::<f64>()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig<T> {
    /// Maximum objective evaluations per run.
    pub budget: usize,
    /// Stencil sizes as fractions of the box width, strictly decreasing.
    pub scales: Vec<T>,
    /// A stencil point must beat the centre by more than this to count.
    pub stencil_tolerance: T,
    pub max_halvings: usize,
    pub seed: u64,
}

impl<T: Real> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self {
            budget: 200,
            scales: (1..=7).map(|k| T::lit(0.5f64.powi(k))).collect(),
            stencil_tolerance: T::zero(),
            max_halvings: 5,
            seed: 0,
        }
    }
}

impl<T: Real> OptimizerConfig<T> {
    pub fn with_budget(budget: usize) -> Self {
        Self {
            budget,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidConfig("budget must be at least 1".into()));
        }
        if self.scales.is_empty() {
            return Err(Error::InvalidConfig("no stencil scales".into()));
        }
        let in_range = self.scales.iter().all(|&s| s > T::zero() && s <= T::one());
        let decreasing = self.scales.windows(2).all(|w| w[1] < w[0]);
        if !in_range || !decreasing {
            return Err(Error::InvalidConfig(
                "scales must be strictly decreasing in (0, 1]".into(),
            ));
        }
        if !(self.stencil_tolerance >= T::zero()) {
            return Err(Error::InvalidConfig("negative stencil tolerance".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult<T> {
    pub best_point: Vec<T>,
    pub best_value: T,
    /// `(evaluation index, value)` for every evaluation, in order.
    pub trace: Vec<(usize, T)>,
    pub evaluations_used: usize,
    /// Scales exhausted before the budget.
    pub converged: bool,
}

struct Budgeted<'a, T, F> {
    f: F,
    bounds: &'a BoxBounds<T>,
    budget: usize,
    trace: Vec<(usize, T)>,
    best: Option<(Vec<T>, T)>,
}

impl<T: Real, F: FnMut(&[T]) -> T> Budgeted<'_, T, F> {
    /// `None` once the budget is spent. Non-finite values count as `+inf`.
    fn eval(&mut self, x: &[T]) -> Option<T> {
        if self.trace.len() >= self.budget {
            return None;
        }
        debug_assert!(self.bounds.contains(x));
        let raw = (self.f)(x);
        let v = if raw.is_finite() { raw } else { T::infinity() };
        self.trace.push((self.trace.len(), v));
        if self.best.as_ref().is_none_or(|(_, b)| v < *b) {
            self.best = Some((x.to_vec(), v));
        }
        Some(v)
    }
}

/// Minimize `f` over `bounds` from `start`.
pub fn minimize<T: Real, F: FnMut(&[T]) -> T>(
    f: F,
    bounds: &BoxBounds<T>,
    cfg: &OptimizerConfig<T>,
    start: &[T],
) -> Result<OptimizationResult<T>> {
    cfg.validate()?;
    if start.len() != bounds.dim() {
        return Err(Error::LengthMismatch {
            expected: bounds.dim(),
            got: start.len(),
        });
    }
    if let Some(i) = (0..bounds.dim()).find(|&i| !(bounds.lower[i] <= start[i] && start[i] <= bounds.upper[i])) {
        return Err(Error::StartOutOfBounds(i));
    }
    let mut ctx = Budgeted {
        f,
        bounds,
        budget: cfg.budget,
        trace: Vec::with_capacity(cfg.budget),
        best: None,
    };
    let converged = run(&mut ctx, bounds, cfg, start).is_some();
    let (best_point, best_value) = ctx.best.expect("budget >= 1 gives one evaluation");
    Ok(OptimizationResult {
        best_point,
        best_value,
        evaluations_used: ctx.trace.len(),
        trace: ctx.trace,
        converged,
    })
}

/// Returns `Some(())` when the scales are exhausted, `None` on budget exhaustion.
fn run<T: Real, F: FnMut(&[T]) -> T>(
    ctx: &mut Budgeted<'_, T, F>,
    bounds: &BoxBounds<T>,
    cfg: &OptimizerConfig<T>,
    start: &[T],
) -> Option<()> {
    let d = bounds.dim();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let mut x = start.to_vec();
    let mut fx = ctx.eval(&x)?;
    for &scale in &cfg.scales {
        loop {
            let mut grad = vec![T::zero(); d];
            let mut best_stencil: Option<(Vec<T>, T)> = None;
            for i in 0..d {
                let step = scale * bounds.width(i);
                let mut probe = |v: T| -> Option<(T, T)> {
                    let vi = bounds.clip(i, v);
                    if vi == x[i] {
                        return Some((vi, fx));
                    }
                    let mut p = x.clone();
                    p[i] = vi;
                    let fp = ctx.eval(&p)?;
                    if best_stencil.as_ref().is_none_or(|(_, b)| fp < *b) {
                        best_stencil = Some((p, fp));
                    }
                    Some((vi, fp))
                };
                let (xp, fp) = probe(x[i] + step)?;
                let (xm, fm) = probe(x[i] - step)?;
                let span = xp - xm;
                grad[i] = if span > T::zero() && fp.is_finite() && fm.is_finite() {
                    (fp - fm) / span
                } else {
                    T::zero()
                };
            }
            let Some((stencil_point, stencil_value)) = best_stencil else {
                break;
            };
            if !(stencil_value < fx - cfg.stencil_tolerance) {
                break;
            }
            // Descent direction in box-normalized coordinates, unit max-norm.
            let g_norm: Vec<T> = (0..d).map(|i| grad[i] * bounds.width(i)).collect();
            let g_max = g_norm.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            let mut candidate = (stencil_point, stencil_value);
            if g_max > T::zero() {
                let mut length = two * two * scale;
                for _ in 0..=cfg.max_halvings {
                    let trial: Vec<T> = (0..d)
                        .map(|i| bounds.clip(i, x[i] - length * bounds.width(i) * g_norm[i] / g_max))
                        .collect();
                    if trial != x {
                        let ft = ctx.eval(&trial)?;
                        if ft < fx {
                            if ft < candidate.1 {
                                candidate = (trial, ft);
                            }
                            break;
                        }
                    }
                    length = length * half;
                }
            }
            x = candidate.0;
            fx = candidate.1;
        }
    }
    Some(())
}

/// Uniform random start points used by [`multi_start_minimize`].
pub fn start_points<T: Real>(bounds: &BoxBounds<T>, n_starts: usize, seed: u64) -> Vec<Vec<T>> {
    (0..n_starts)
        .map(|k| bounds.sample_uniform(&mut rng_from_seed(derive_seed(seed, &[k as u64, 0]))))
        .collect()
}

/// RNG stream handed to the objective during start `k`.
pub fn objective_stream(seed: u64, k: usize) -> Rng {
    rng_from_seed(derive_seed(seed, &[k as u64, 1]))
}

/// Run [`minimize`] from `n_starts` seeded uniform points (in parallel) and
/// keep the best result; ties go to the earlier start. The objective receives
/// a per-start RNG so stochastic objectives stay reproducible.
pub fn multi_start_minimize<T, F>(
    f: F,
    bounds: &BoxBounds<T>,
    cfg: &OptimizerConfig<T>,
    n_starts: usize,
    seed: u64,
) -> Result<OptimizationResult<T>>
where
    T: Real,
    F: Fn(&[T], &mut Rng) -> T + Sync,
{
    if n_starts == 0 {
        return Err(Error::InvalidConfig("n_starts must be at least 1".into()));
    }
    let starts = start_points(bounds, n_starts, seed);
    let results: Vec<OptimizationResult<T>> = starts
        .par_iter()
        .enumerate()
        .map(|(k, start)| {
            let mut rng = objective_stream(seed, k);
            minimize(|x: &[T]| f(x, &mut rng), bounds, cfg, start)
        })
        .collect::<Result<_>>()?;
    Ok(results
        .into_iter()
        .reduce(|best, r| if r.best_value < best.best_value { r } else { best })
        .expect("at least one start"))
}
