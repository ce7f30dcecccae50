//! Metrics, robust aggregation and the two growth-curve fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `|C - E| / |E|`.
pub fn relative_error<T: Real>(expectation: T, ground_energy: T) -> Result<T> {
    if ground_energy == T::zero() {
        return Err(Error::ZeroGroundEnergy);
    }
    Ok(((expectation - ground_energy) / ground_energy).abs())
}

/// `1 - (1 - p_eff)^k`
pub fn cumulative_success<T: Real>(p_eff: T, k: u32) -> Result<T> {
    if !(p_eff >= T::zero() && p_eff <= T::one()) {
        return Err(Error::InvalidProbability(format!("p_eff = {p_eff}")));
    }
    Ok(T::one() - (T::one() - p_eff).powi(k as i32))
}

/// Per-query probability whose `k`-fold cumulative success is `success`.
pub fn per_query_from_cumulative<T: Real>(success: T, k: u32) -> Result<T> {
    if !(success >= T::zero() && success <= T::one()) || k == 0 {
        return Err(Error::InvalidProbability(format!("success = {success}, k = {k}")));
    }
    Ok(T::one() - (T::one() - success).powf(T::one() / T::from_u32(k).expect("u32 fits")))
}

/// `(median, median absolute deviation)`.
pub fn aggregate<T: Real>(values: &[T]) -> Result<(T, T)> {
    if values.is_empty() {
        return Err(Error::Empty("aggregate input"));
    }
    let med = median(values.to_vec());
    let mad = median(values.iter().map(|&v| (v - med).abs()).collect());
    Ok((med, mad))
}

fn median<T: Real>(mut v: Vec<T>) -> T {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) * T::lit(0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum CurveModel<T> {
    /// `a n^b`
    PowerLaw { a: T, b: T },
    /// `1 - (1 - a / 2^(b n))^k`
    CumulativeSuccess { a: T, b: T, k: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveFit<T> {
    #[serde(flatten)]
    pub model: CurveModel<T>,
    /// Mean relative error of the fitted curve against the data.
    pub fit_error: T,
    pub iterations: usize,
}

impl<T: Real> CurveFit<T> {
    /// Model value at `n`, as fitted (no clamping).
    pub fn eval(&self, n: T) -> T {
        match self.model {
            CurveModel::PowerLaw { a, b } => a * n.powf(b),
            CurveModel::CumulativeSuccess { a, b, k } => {
                T::one() - (T::one() - per_query_raw(a, b, n)).powi(k as i32)
            }
        }
    }

    /// Per-query success `a / 2^(b n)`, clamped to 1 and fixed at 1 for `n < 3`.
    pub fn per_query(&self, n: T) -> T {
        match self.model {
            CurveModel::CumulativeSuccess { a, b, .. } => {
                if n < T::lit(3.0) {
                    T::one()
                } else {
                    per_query_raw(a, b, n).min(T::one()).max(T::zero())
                }
            }
            CurveModel::PowerLaw { .. } => self.eval(n),
        }
    }

    /// Cumulative success after `queries`, using the clamped per-query value.
    pub fn cumulative(&self, n: T, queries: u32) -> T {
        T::one() - (T::one() - self.per_query(n)).powi(queries as i32)
    }
}

fn per_query_raw<T: Real>(a: T, b: T, n: T) -> T {
    a * T::lit(2.0).powf(-b * n)
}

fn mean_relative_error<T: Real>(points: &[(T, T)], f: impl Fn(T) -> T) -> T {
    let rel: Vec<T> = points
        .iter()
        .filter(|(_, y)| *y != T::zero())
        .map(|&(x, y)| ((f(x) - y) / y).abs())
        .collect();
    if rel.is_empty() {
        T::zero()
    } else {
        rel.iter().copied().sum::<T>() / T::from_usize_lossy(rel.len())
    }
}

const MAX_ITERS: usize = 500;

/// Damped Gauss-Newton (Levenberg style) for one or two parameters.
///
/// `model(x, theta)` returns the value and its gradient in `theta`.
fn gauss_newton<T: Real>(
    points: &[(T, T)],
    mut theta: [T; 2],
    free: [bool; 2],
    model: impl Fn(T, [T; 2]) -> (T, [T; 2]),
) -> Result<([T; 2], usize)> {
    let sse = |th: [T; 2]| -> T {
        points
            .iter()
            .map(|&(x, y)| {
                let r = model(x, th).0 - y;
                r * r
            })
            .sum()
    };
    let mut cost = sse(theta);
    let mut lambda = T::lit(1e-3);
    let tiny = T::epsilon();
    for iter in 1..=MAX_ITERS {
        let mut jtj = [[T::zero(); 2]; 2];
        let mut jtr = [T::zero(); 2];
        for &(x, y) in points {
            let (v, g) = model(x, theta);
            let r = v - y;
            for i in 0..2 {
                if !free[i] {
                    continue;
                }
                jtr[i] += g[i] * r;
                for j in 0..2 {
                    if free[j] {
                        jtj[i][j] += g[i] * g[j];
                    }
                }
            }
        }
        let grad_norm = jtr[0].abs().max(jtr[1].abs());
        if cost <= T::lit(1e-30) || grad_norm <= tiny * tiny {
            return Ok((theta, iter));
        }
        loop {
            let mut m = jtj;
            for i in 0..2 {
                if free[i] {
                    m[i][i] += lambda * jtj[i][i].max(tiny);
                } else {
                    m[i][i] = T::one();
                }
            }
            let step = solve2(m, [-jtr[0], -jtr[1]]);
            let trial = [theta[0] + step[0], theta[1] + step[1]];
            let trial_cost = sse(trial);
            if trial_cost.is_finite() && trial_cost < cost {
                let rel_step = (step[0].abs() / theta[0].abs().max(T::one()))
                    .max(step[1].abs() / theta[1].abs().max(T::one()));
                let rel_drop = (cost - trial_cost) / cost.max(T::lit(1e-300));
                theta = trial;
                cost = trial_cost;
                lambda = (lambda * T::lit(0.1)).max(T::lit(1e-12));
                if rel_step < T::lit(1e-13) || rel_drop < T::lit(1e-15) {
                    return Ok((theta, iter));
                }
                break;
            }
            lambda = lambda * T::lit(10.0);
            if lambda > T::lit(1e16) {
                // No descent direction left at working precision.
                return Ok((theta, iter));
            }
        }
    }
    Err(Error::FitNonConvergence(MAX_ITERS))
}

fn solve2<T: Real>(m: [[T; 2]; 2], r: [T; 2]) -> [T; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det == T::zero() {
        return [T::zero(); 2];
    }
    [
        (r[0] * m[1][1] - m[0][1] * r[1]) / det,
        (m[0][0] * r[1] - m[1][0] * r[0]) / det,
    ]
}

/// Fit `value = a n^b`, or `a` alone with `b` fixed.
pub fn fit_power_law<T: Real>(points: &[(T, T)], fixed_b: Option<T>) -> Result<CurveFit<T>> {
    if points.len() < 2 {
        return Err(Error::DegenerateData("power-law fit needs at least two points".into()));
    }
    if points.iter().any(|&(n, y)| !(n > T::zero() && y > T::zero())) {
        return Err(Error::DegenerateData("power-law fit needs positive n and values".into()));
    }
    let logs: Vec<(T, T)> = points.iter().map(|&(n, y)| (n.ln(), y.ln())).collect();
    let len = T::from_usize_lossy(logs.len());
    let (b0, ln_a0) = match fixed_b {
        Some(b) => (b, logs.iter().map(|&(lx, ly)| ly - b * lx).sum::<T>() / len),
        None => {
            let mx = logs.iter().map(|p| p.0).sum::<T>() / len;
            let my = logs.iter().map(|p| p.1).sum::<T>() / len;
            let sxx: T = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
            if sxx == T::zero() {
                return Err(Error::DegenerateData("all n identical".into()));
            }
            let sxy: T = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let b = sxy / sxx;
            (b, my - b * mx)
        }
    };
    let model = |n: T, th: [T; 2]| {
        let nb = n.powf(th[1]);
        (th[0] * nb, [nb, th[0] * nb * n.ln()])
    };
    let (theta, iterations) =
        gauss_newton(points, [ln_a0.exp(), b0], [true, fixed_b.is_none()], model)?;
    let (a, b) = (theta[0], theta[1]);
    Ok(CurveFit {
        model: CurveModel::PowerLaw { a, b },
        fit_error: mean_relative_error(points, |n| a * n.powf(b)),
        iterations,
    })
}

/// Fit `success = 1 - (1 - a / 2^(b n))^k` for `(a, b)`, or `b` with `a = 1`.
pub fn fit_success_model<T: Real>(
    points: &[(T, T)],
    k: u32,
    fix_a_to_one: bool,
) -> Result<CurveFit<T>> {
    if points.is_empty() || k == 0 {
        return Err(Error::DegenerateData("need points and k >= 1".into()));
    }
    if points.iter().any(|&(_, s)| !(s >= T::zero() && s <= T::one())) {
        return Err(Error::DegenerateData("success values must lie in [0, 1]".into()));
    }
    if points.iter().all(|&(_, s)| s == T::zero()) {
        return Err(Error::DegenerateData("all success values are zero".into()));
    }
    let needed = if fix_a_to_one { 1 } else { 2 };
    if points.len() < needed {
        return Err(Error::DegenerateData(format!("need at least {needed} points")));
    }
    let ln2 = T::LN_2();
    let kk = k as i32;
    let model = move |n: T, th: [T; 2]| {
        let base = T::lit(2.0).powf(-th[1] * n);
        let p = th[0] * base;
        let q = T::one() - p;
        let value = T::one() - q.powi(kk);
        let ds_dp = T::from_i32(kk).expect("k fits") * q.powi(kk - 1);
        (value, [ds_dp * base, ds_dp * (-th[0] * n * ln2 * base)])
    };
    let sse = |th: [T; 2]| -> T {
        points
            .iter()
            .map(|&(x, y)| {
                let r = model(x, th).0 - y;
                r * r
            })
            .sum()
    };
    let a_grid: Vec<T> = if fix_a_to_one {
        vec![T::one()]
    } else {
        (0..=60).map(|i| T::lit(0.05 * 100f64.powf(i as f64 / 60.0))).collect()
    };
    let mut start = [T::one(), T::lit(0.5)];
    let mut best = T::infinity();
    for &a in &a_grid {
        for i in 0..=400 {
            let b = T::lit(2.0 * i as f64 / 400.0);
            let c = sse([a, b]);
            if c < best {
                best = c;
                start = [a, b];
            }
        }
    }
    let (theta, iterations) = gauss_newton(points, start, [!fix_a_to_one, true], model)?;
    let fit = CurveFit {
        model: CurveModel::CumulativeSuccess {
            a: theta[0],
            b: theta[1],
            k,
        },
        fit_error: T::zero(),
        iterations,
    };
    Ok(CurveFit {
        fit_error: mean_relative_error(points, |n| fit.eval(n)),
        ..fit
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn relative_error_cases() {
        assert_eq!(relative_error(-7.0, -7.0).unwrap(), 0.0);
        assert!((relative_error(-6.3f64, -7.0).unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(relative_error(0.0, -7.0).unwrap(), 1.0);
        assert!(matches!(relative_error(1.0, 0.0), Err(Error::ZeroGroundEnergy)));
    }

    #[test]
    fn cumulative_cases() {
        assert_eq!(cumulative_success(0.5, 2).unwrap(), 0.75);
        assert!((cumulative_success(0.3f64, 1).unwrap() - 0.3).abs() < 1e-15);
        assert!(cumulative_success(1.5, 2).is_err());
        let p: f64 = per_query_from_cumulative(0.75, 2).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn aggregate_cases() {
        assert_eq!(aggregate(&[1.0, 2.0, 3.0]).unwrap(), (2.0, 1.0));
        assert_eq!(aggregate(&[4.0; 5]).unwrap(), (4.0, 0.0));
        assert_eq!(aggregate(&[1.0, 2.0, 3.0, 10.0]).unwrap(), (2.5, 1.0));
        assert!(aggregate::<f64>(&[]).is_err());
    }

    #[test]
    fn aggregate_matches_sort_oracle() {
        let mut rng = crate::rng::rng_from_seed(4);
        for len in 1..30 {
            let v: Vec<f64> = (0..len).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let mut s = v.clone();
            s.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let oracle_med = if len % 2 == 1 { s[len / 2] } else { 0.5 * (s[len / 2 - 1] + s[len / 2]) };
            let mut d: Vec<f64> = s.iter().map(|x| (x - oracle_med).abs()).collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let oracle_mad = if len % 2 == 1 { d[len / 2] } else { 0.5 * (d[len / 2 - 1] + d[len / 2]) };
            assert_eq!(aggregate(&v).unwrap(), (oracle_med, oracle_mad));
        }
    }

    #[test]
    fn power_law_noiseless_recovery() {
        let pts: Vec<(f64, f64)> = [3.0, 4.0, 5.0, 9.0, 10.0]
            .iter()
            .map(|&n: &f64| (n, 2.0 * n.powf(0.5)))
            .collect();
        let fit = fit_power_law(&pts, None).unwrap();
        let CurveModel::PowerLaw { a, b } = fit.model else { panic!() };
        assert!((a - 2.0).abs() < 1e-6 && (b - 0.5).abs() < 1e-6);
        assert!(fit.fit_error < 1e-9);
    }

    #[test]
    fn power_law_fixed_exponent() {
        let pts: Vec<(f64, f64)> = [3.0, 4.0, 5.0].iter().map(|&n: &f64| (n, 0.04 * n.powf(0.85))).collect();
        let fit = fit_power_law(&pts, Some(0.85)).unwrap();
        let CurveModel::PowerLaw { a, b } = fit.model else { panic!() };
        assert_eq!(b, 0.85);
        assert!((a - 0.04).abs() < 1e-10);
        assert!(fit_power_law(&pts[..1], None).is_err());
        assert!(fit_power_law(&[(1.0, -1.0), (2.0, 1.0)], None).is_err());
    }

    #[test]
    fn power_law_with_noise_recovers_exponent() {
        for seed in 0..20 {
            let mut rng = crate::rng::rng_from_seed(seed);
            let pts: Vec<(f64, f64)> = (3..=10)
                .map(|n| {
                    let n = n as f64;
                    (n, 0.04 * n.powf(0.85) * (1.0 + rng.gen_range(-0.05..0.05)))
                })
                .collect();
            let CurveModel::PowerLaw { b, .. } = fit_power_law(&pts, None).unwrap().model else {
                panic!()
            };
            assert!((b - 0.85).abs() < 0.1, "seed {seed}: b = {b}");
        }
    }

    #[test]
    fn success_model_noiseless_recovery() {
        let pts: Vec<(f64, f64)> = (3..=20)
            .map(|n| {
                let n = n as f64;
                (n, 1.0 - (1.0 - 2f64.powf(-0.1786 * n)).powi(10))
            })
            .collect();
        let fit = fit_success_model(&pts, 10, true).unwrap();
        let CurveModel::CumulativeSuccess { a, b, k } = fit.model else { panic!() };
        assert_eq!((a, k), (1.0, 10));
        assert!((b - 0.1786).abs() < 1e-6);

        let pts: Vec<(f64, f64)> = [3.0, 4.0, 5.0, 9.0, 10.0]
            .iter()
            .map(|&n: &f64| (n, 1.5968 * 2f64.powf(-0.3967 * n)))
            .collect();
        let fit = fit_success_model(&pts, 1, false).unwrap();
        let CurveModel::CumulativeSuccess { a, b, .. } = fit.model else { panic!() };
        assert!((a - 1.5968).abs() < 1e-6 && (b - 0.3967).abs() < 1e-6);
        for n in 3..=10 {
            let n = n as f64;
            assert!(fit.cumulative(n, 10) >= fit.per_query(n));
        }
        assert_eq!(fit.per_query(2.0), 1.0);
    }

    #[test]
    fn success_model_rejects_degenerate_data() {
        assert!(fit_success_model(&[(3.0, 0.0), (4.0, 0.0)], 10, true).is_err());
        assert!(fit_success_model(&[(3.0, 1.2)], 10, true).is_err());
    }

    #[test]
    fn fit_serializes_in_table_format() {
        let fit = CurveFit {
            model: CurveModel::CumulativeSuccess { a: 1.0, b: 0.1786, k: 10 },
            fit_error: 0.0312,
            iterations: 4,
        };
        let v: serde_json::Value = serde_json::to_value(fit).unwrap();
        assert_eq!(v["model"], "cumulative_success");
        assert_eq!(v["a"], 1.0);
        assert_eq!(v["b"], 0.1786);
        assert_eq!(v["fit_error"], 0.0312);
    }

    proptest! {
        #[test]
        fn cumulative_monotone(p in 0.0f64..1.0, dp in 0.0f64..0.5, k in 1u32..30) {
            let q = (p + dp).min(1.0);
            let a = cumulative_success(p, k).unwrap();
            prop_assert!(cumulative_success(q, k).unwrap() >= a);
            prop_assert!(cumulative_success(p, k + 1).unwrap() >= a);
            prop_assert!((a - (1.0 - (1.0 - p).powi(k as i32))).abs() <= 1e-15);
        }

        #[test]
        fn aggregate_permutation_invariant(mut v in proptest::collection::vec(-100.0f64..100.0, 1..40), rot in 0usize..40) {
            let a = aggregate(&v).unwrap();
            let r = rot % v.len();
            v.rotate_left(r);
            v.reverse();
            prop_assert_eq!(a, aggregate(&v).unwrap());
        }

        #[test]
        fn power_law_fit_is_locally_optimal(seed in 0u64..1000) {
            let mut rng = crate::rng::rng_from_seed(seed);
            let pts: Vec<(f64, f64)> = (3..=10)
                .map(|n| (n as f64, 0.1 * (n as f64).powf(0.9) * (1.0 + rng.gen_range(-0.2..0.2))))
                .collect();
            let fit = fit_power_law(&pts, None).unwrap();
            let CurveModel::PowerLaw { a, b } = fit.model else { panic!() };
            let sse = |a: f64, b: f64| pts.iter().map(|&(n, y)| (a * n.powf(b) - y).powi(2)).sum::<f64>();
            let best = sse(a, b);
            for _ in 0..100 {
                let pa = a * (1.0 + rng.gen_range(-0.1..0.1));
                let pb = b + rng.gen_range(-0.1..0.1);
                prop_assert!(best <= sse(pa, pb) * (1.0 + 1e-12));
            }
        }
    }
}
