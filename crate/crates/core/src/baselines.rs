//! Classical baselines: Metropolis simulated annealing on the Ising form and
//! uniform random sampling.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::aggregate;
use crate::error::{Error, Result};
use crate::problem::{GroundStates, IsingProblem, SpinConvention};
use crate::rng::{derive_seed, label_hash, rng_from_seed};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaConfig<T> {
    pub t0: T,
    pub tf: T,
    /// Number of temperature steps.
    pub k: usize,
    /// Full single-flip sweeps at each temperature.
    pub sweeps_per_step: usize,
    pub seed: u64,
}

impl<T: Real> Default for SaConfig<T> {
    fn default() -> Self {
        Self {
            t0: T::lit(100.0),
            tf: T::lit(0.01),
            k: 10,
            sweeps_per_step: 1,
            seed: 0,
        }
    }
}

impl<T: Real> SaConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tf > T::zero() && self.t0 > self.tf && self.t0.is_finite()) {
            return Err(Error::InvalidConfig("need t0 > tf > 0".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// `T_i = t0 (tf / t0)^(i / k)` for `0 <= i <= k`.
pub fn sa_schedule<T: Real>(cfg: &SaConfig<T>, i: usize) -> Result<T> {
    cfg.validate()?;
    if i > cfg.k {
        return Err(Error::InvalidConfig(format!("step {i} beyond k = {}", cfg.k)));
    }
    if i == 0 {
        return Ok(cfg.t0);
    }
    if i == cfg.k {
        return Ok(cfg.tf);
    }
    let frac = T::from_usize_lossy(i) / T::from_usize_lossy(cfg.k);
    Ok(cfg.t0 * (cfg.tf / cfg.t0).powf(frac))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaResult<T> {
    /// Basis index of the best state seen.
    pub best_state: usize,
    pub best_energy: T,
}

impl<T: Real> SaResult<T> {
    pub fn best_bits(&self, n: usize) -> Vec<u8> {
        SpinConvention::bits_of_index(self.best_state, n)
    }
}

/// Single-flip Metropolis annealing from a uniform random state.
///
/// Step `i = 1..=k` runs `sweeps_per_step` sweeps at temperature `T_i`; a
/// sweep proposes one flip per spin in a fresh random order. The last step
/// therefore runs at `tf`. Returns the best state ever visited.
pub fn sa_run<T: Real>(p: &IsingProblem<T>, cfg: &SaConfig<T>) -> Result<SaResult<T>> {
    cfg.validate()?;
    let n = p.num_spins();
    if n == 0 {
        return Err(Error::InvalidInstance("problem has no spins".into()));
    }
    if n >= usize::BITS as usize {
        return Err(Error::TooLarge {
            n,
            limit: usize::BITS as usize - 1,
        });
    }
    let mut neighbors: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
    for (&(a, b), &j) in &p.j {
        neighbors[a].push((b, j));
        neighbors[b].push((a, j));
    }
    let mut rng = rng_from_seed(cfg.seed);
    let mut z: usize = (0..n).fold(0, |z, q| z | (usize::from(rng.gen::<bool>()) << q));
    let spin = |z: usize, q: usize| -> T { SpinConvention::spin(SpinConvention::bit(z, q)) };
    let mut energy = p.energy_of_index(z);
    let mut best = SaResult {
        best_state: z,
        best_energy: energy,
    };
    let two = T::lit(2.0);
    let mut order: Vec<usize> = (0..n).collect();
    for i in 1..=cfg.k {
        let temp = sa_schedule(cfg, i)?;
        for _ in 0..cfg.sweeps_per_step {
            order.shuffle(&mut rng);
            for &q in &order {
                let local = neighbors[q]
                    .iter()
                    .fold(p.h[q], |acc, &(r, j)| acc + j * spin(z, r));
                let delta = -two * spin(z, q) * local;
                let u: f64 = rng.gen();
                if delta <= T::zero() || T::lit(u) < (-delta / temp).exp() {
                    z ^= 1 << q;
                    energy += delta;
                    if energy < best.best_energy {
                        best = SaResult {
                            best_state: z,
                            best_energy: energy,
                        };
                    }
                }
            }
        }
    }
    // Re-evaluate to drop accumulated rounding from the incremental updates.
    best.best_energy = p.energy_of_index(best.best_state);
    Ok(best)
}

/// Fraction of `runs` independent annealing runs ending in a ground state.
/// Run `r` uses seed `derive_seed(cfg.seed, [r])`.
pub fn sa_success_fraction<T: Real>(
    p: &IsingProblem<T>,
    ground: &GroundStates<T>,
    runs: usize,
    cfg: &SaConfig<T>,
) -> Result<f64> {
    if runs == 0 {
        return Err(Error::InvalidConfig("runs must be at least 1".into()));
    }
    let hits: Vec<bool> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let run_cfg = cfg.with_seed(derive_seed(cfg.seed, &[r as u64]));
            sa_run(p, &run_cfg).map(|res| ground.contains(res.best_state))
        })
        .collect::<Result<_>>()?;
    Ok(hits.iter().filter(|&&h| h).count() as f64 / runs as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessRow {
    pub n: usize,
    pub problem_id: String,
    pub success_fraction: f64,
}

/// A problem with its exhaustive ground states, as consumed by the curve.
pub struct SuiteProblem<'a, T> {
    pub id: String,
    pub ising: &'a IsingProblem<T>,
    pub ground: &'a GroundStates<T>,
}

/// Per-problem success fractions and the per-`n` median.
pub fn sa_success_curve<T: Real>(
    problems: &[SuiteProblem<'_, T>],
    runs_per_problem: usize,
    cfg: &SaConfig<T>,
) -> Result<(Vec<SuccessRow>, Vec<(usize, f64)>)> {
    let rows: Vec<SuccessRow> = problems
        .iter()
        .map(|sp| {
            let run_cfg = cfg.with_seed(derive_seed(cfg.seed, &[label_hash(&sp.id)]));
            Ok(SuccessRow {
                n: sp.ising.num_spins(),
                problem_id: sp.id.clone(),
                success_fraction: sa_success_fraction(sp.ising, sp.ground, runs_per_problem, &run_cfg)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok((rows.clone(), median_by_n(&rows)))
}

/// Median success fraction per `n`, ascending in `n`.
pub fn median_by_n(rows: &[SuccessRow]) -> Vec<(usize, f64)> {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter()
        .map(|n| {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.success_fraction)
                .collect();
            (n, aggregate(&vals).expect("non-empty group").0)
        })
        .collect()
}

/// `1 - (1 - g / 2^n)^queries`
pub fn random_sampling_success(n: usize, ground_count: usize, queries: u64) -> Result<f64> {
    if ground_count == 0 {
        return Err(Error::InvalidConfig("ground_count must be at least 1".into()));
    }
    let per_query = ground_count as f64 / 2f64.powi(n as i32);
    if per_query > 1.0 {
        return Err(Error::InvalidConfig("more ground states than bitstrings".into()));
    }
    Ok(1.0 - (1.0 - per_query).powf(queries as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{brute_force_solve, qubo_to_ising, Couplings, QuboProblem};

    fn worked_ising() -> IsingProblem<f64> {
        let mut w = Couplings::new();
        w.insert((0, 1), 6.0);
        w.insert((0, 2), 12.0);
        w.insert((1, 2), 12.0);
        qubo_to_ising(&QuboProblem {
            linear: vec![-12.0, -12.0, -13.0],
            quadratic: w,
            constant: 18.0,
        })
    }

    #[test]
    fn schedule_endpoints_and_midpoint() {
        let cfg = SaConfig::<f64>::default();
        assert_eq!(sa_schedule(&cfg, 0).unwrap(), 100.0);
        assert_eq!(sa_schedule(&cfg, 10).unwrap(), 0.01);
        assert!((sa_schedule(&cfg, 5).unwrap() - 1.0).abs() < 1e-12);
        assert!(sa_schedule(&cfg, 11).is_err());
        let temps: Vec<f64> = (0..=10).map(|i| sa_schedule(&cfg, i).unwrap()).collect();
        assert!(temps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn config_validation() {
        let bad = SaConfig::<f64> {
            t0: 0.01,
            tf: 100.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad_k = SaConfig::<f64> {
            k: 0,
            ..Default::default()
        };
        assert!(bad_k.validate().is_err());
    }

    #[test]
    fn zero_temperature_limit_only_descends() {
        let p = worked_ising();
        let cfg = SaConfig {
            t0: 1.0,
            tf: 1e-300,
            k: 1,
            sweeps_per_step: 1,
            seed: 0,
        };
        for seed in 0..50 {
            let cfg = cfg.with_seed(seed);
            let mut rng = rng_from_seed(seed);
            let start: usize = (0..3).fold(0, |z, q| z | (usize::from(rng.gen::<bool>()) << q));
            let r = sa_run(&p, &cfg).unwrap();
            assert!(r.best_energy <= p.energy_of_index(start));
        }
    }

    #[test]
    fn worked_example_success_beats_random_guess() {
        let p = worked_ising();
        let g = brute_force_solve(&p).unwrap();
        let frac = sa_success_fraction(&p, &g, 1000, &SaConfig::default()).unwrap();
        assert!(frac > 1.0 / 8.0, "{frac}");
    }

    #[test]
    fn zero_problem_always_succeeds() {
        let p = IsingProblem::<f64>::zero(4);
        let g = brute_force_solve(&p).unwrap();
        assert_eq!(sa_success_fraction(&p, &g, 50, &SaConfig::default()).unwrap(), 1.0);
    }

    #[test]
    fn sa_never_beats_ground_and_is_deterministic() {
        let p = worked_ising();
        let g = brute_force_solve(&p).unwrap();
        for seed in 0..100 {
            let cfg = SaConfig::default().with_seed(seed);
            let r = sa_run(&p, &cfg).unwrap();
            assert!(r.best_energy >= g.energy);
            assert_eq!(r.best_energy == g.energy, g.contains(r.best_state));
            assert_eq!(r, sa_run(&p, &cfg).unwrap());
        }
    }

    #[test]
    fn scaling_energies_and_temperatures_together_is_invisible() {
        let p = worked_ising();
        let base = SaConfig::default();
        for factor in [0.25, 4.0, 8.0] {
            let scaled = SaConfig {
                t0: base.t0 * factor,
                tf: base.tf * factor,
                ..base
            };
            let sp = p.scaled(factor);
            for seed in 0..100 {
                let a = sa_run(&p, &base.with_seed(seed)).unwrap();
                let b = sa_run(&sp, &scaled.with_seed(seed)).unwrap();
                assert_eq!(a.best_state, b.best_state);
            }
        }
    }

    #[test]
    fn random_sampling_formula() {
        assert_eq!(random_sampling_success(3, 1, 1).unwrap(), 0.125);
        assert!(random_sampling_success(3, 1, 10_000).unwrap() > 1.0 - 1e-12);
        assert!(random_sampling_success(3, 0, 1).is_err());
    }

    #[test]
    fn random_sampling_matches_simulation() {
        let (n, g, q) = (4usize, 2usize, 3u64);
        let analytic = random_sampling_success(n, g, q).unwrap();
        let trials = 100_000;
        let mut rng = rng_from_seed(8);
        let hits = (0..trials)
            .filter(|_| (0..q).any(|_| rng.gen_range(0..1usize << n) < g))
            .count();
        let sigma = (analytic * (1.0 - analytic) / trials as f64).sqrt();
        assert!((hits as f64 / trials as f64 - analytic).abs() < 5.0 * sigma);
    }
}
