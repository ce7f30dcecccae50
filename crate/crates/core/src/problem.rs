//! Binary linear least squares, QUBO and Ising problem types.
//!
//! Bit convention used throughout the crate: a basis-state index `z` stores
//! the measured value of qubit `j` in bit `j`. A measured bit `0` is spin
//! `+1` and a measured bit `1` is spin `-1`; the binary variable of the
//! least-squares problem is the complement of the measured bit, `x = 1 - bit`,
//! so that `spin = 2x - 1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest `n` accepted by the exhaustive solvers.
pub const MAX_BRUTE_FORCE_VARS: usize = 24;

/// Pairwise coefficients keyed by `(j, k)` with `j < k`.
pub type Couplings<T> = BTreeMap<(usize, usize), T>;

/// Mapping between measured bits, spins and least-squares variables.
pub struct SpinConvention;

impl SpinConvention {
    /// Measured bit of qubit `j` in basis index `z`.
    #[inline]
    pub fn bit(z: usize, j: usize) -> u8 {
        ((z >> j) & 1) as u8
    }

    /// Spin of a measured bit: `0 -> +1`, `1 -> -1`.
    #[inline]
    pub fn spin<T: Real>(bit: u8) -> T {
        if bit == 0 {
            T::one()
        } else {
            -T::one()
        }
    }

    /// Least-squares variable of a measured bit.
    #[inline]
    pub fn variable(bit: u8) -> u8 {
        1 - bit
    }

    /// Measured bits of basis index `z`, qubit 0 first.
    pub fn bits_of_index(z: usize, n: usize) -> Vec<u8> {
        (0..n).map(|j| Self::bit(z, j)).collect()
    }

    pub fn index_of_bits(bits: &[u8]) -> usize {
        bits.iter()
            .enumerate()
            .fold(0, |z, (j, &b)| z | (usize::from(b & 1) << j))
    }

    /// Least-squares solution encoded by basis index `z`.
    pub fn variables_of_index(z: usize, n: usize) -> Vec<u8> {
        (0..n).map(|j| Self::variable(Self::bit(z, j))).collect()
    }

    /// Basis index whose measured bits encode the variable vector `x`.
    pub fn index_of_variables(x: &[u8]) -> usize {
        x.iter()
            .enumerate()
            .fold(0, |z, (j, &v)| z | (usize::from(1 - (v & 1)) << j))
    }

    /// Printable bitstring, qubit 0 (the first variable) leftmost.
    pub fn label(z: usize, n: usize) -> String {
        (0..n)
            .map(|j| if Self::bit(z, j) == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn parse_label(s: &str) -> Result<usize> {
        s.chars().enumerate().try_fold(0usize, |z, (j, c)| match c {
            '0' => Ok(z),
            '1' => Ok(z | (1 << j)),
            other => Err(Error::Parse {
                line: 0,
                msg: format!("bad bit character {other:?} in {s:?}"),
            }),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    Consistent,
    Inconsistent,
}

/// `min ||A x - b||^2` over binary `x`. `A` is stored dense, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BllsInstance<T> {
    m: usize,
    n: usize,
    a: Vec<T>,
    b: Vec<T>,
    pub x_star: Option<Vec<u8>>,
    pub kind: InstanceKind,
    pub seed: u64,
}

impl<T: Real> BllsInstance<T> {
    pub fn new(
        a_rows: Vec<Vec<T>>,
        b: Vec<T>,
        x_star: Option<Vec<u8>>,
        kind: InstanceKind,
        seed: u64,
    ) -> Result<Self> {
        let m = a_rows.len();
        if m == 0 {
            return Err(Error::InvalidInstance("A has no rows".into()));
        }
        let n = a_rows[0].len();
        if n == 0 {
            return Err(Error::InvalidInstance("A has no columns".into()));
        }
        if let Some(row) = a_rows.iter().find(|r| r.len() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                got: row.len(),
            });
        }
        if b.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                got: b.len(),
            });
        }
        let a: Vec<T> = a_rows.into_iter().flatten().collect();
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance("non-finite entry".into()));
        }
        let inst = Self {
            m,
            n,
            a,
            b,
            x_star,
            kind,
            seed,
        };
        inst.validate_optimum()?;
        Ok(inst)
    }

    fn validate_optimum(&self) -> Result<()> {
        let Some(x) = &self.x_star else {
            return Ok(());
        };
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if x.iter().any(|&v| v > 1) {
            return Err(Error::InvalidInstance("x_star is not binary".into()));
        }
        if self.kind == InstanceKind::Consistent {
            let ax = self.apply(x);
            let tol = T::lit(1e-9);
            if ax.iter().zip(&self.b).any(|(&l, &r)| (l - r).abs() > tol) {
                return Err(Error::InvalidInstance(
                    "consistent instance with A x_star != b".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn a(&self, i: usize, j: usize) -> T {
        self.a[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    /// `A x` for a binary `x`.
    pub fn apply(&self, x: &[u8]) -> Vec<T> {
        (0..self.m)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(_, &xj)| xj == 1)
                    .map(|(&a, _)| a)
                    .sum()
            })
            .collect()
    }

    /// `||A x - b||^2`.
    pub fn residual_sq(&self, x: &[u8]) -> T {
        self.apply(x)
            .iter()
            .zip(&self.b)
            .map(|(&l, &r)| (l - r) * (l - r))
            .sum()
    }

    pub fn b_norm_sq(&self) -> T {
        self.b.iter().map(|&v| v * v).sum()
    }

    /// Same instance with rows permuted by `order`.
    pub fn permute_rows(&self, order: &[usize]) -> Self {
        let mut out = self.clone();
        out.a = order.iter().flat_map(|&i| self.row(i).to_vec()).collect();
        out.b = order.iter().map(|&i| self.b[i]).collect();
        out
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            m: self.m,
            n: self.n,
            a: (0..self.m)
                .map(|i| self.row(i).iter().map(|v| v.as_f64()).collect())
                .collect(),
            b: self.b.iter().map(|v| v.as_f64()).collect(),
            x_star: self.x_star.clone(),
            kind: self.kind,
            seed: self.seed,
        }
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self> {
        if file.a.len() != file.m {
            return Err(Error::LengthMismatch {
                expected: file.m,
                got: file.a.len(),
            });
        }
        let rows: Vec<Vec<T>> = file
            .a
            .iter()
            .map(|r| r.iter().map(|&v| T::lit(v)).collect())
            .collect();
        let inst = Self::new(
            rows,
            file.b.iter().map(|&v| T::lit(v)).collect(),
            file.x_star.clone(),
            file.kind,
            file.seed,
        )?;
        if inst.n != file.n {
            return Err(Error::LengthMismatch {
                expected: file.n,
                got: inst.n,
            });
        }
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("instance serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(s).map_err(|e| Error::Parse {
                line: e.line(),
                msg: e.to_string(),
            })?;
        Self::from_file(&file)
    }
}

/// On-disk JSON form of a [`BllsInstance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub x_star: Option<Vec<u8>>,
    pub kind: InstanceKind,
    pub seed: u64,
}

/// `F(x) = sum_j v_j x_j + sum_{j<k} w_jk x_j x_k`, with `constant` kept aside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboProblem<T> {
    pub linear: Vec<T>,
    pub quadratic: Couplings<T>,
    pub constant: T,
}

impl<T: Real> QuboProblem<T> {
    pub fn zero(n: usize) -> Self {
        Self {
            linear: vec![T::zero(); n],
            quadratic: Couplings::new(),
            constant: T::zero(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    /// QUBO objective, constant excluded.
    pub fn evaluate(&self, x: &[u8]) -> T {
        let lin: T = self
            .linear
            .iter()
            .zip(x)
            .filter(|(_, &v)| v == 1)
            .map(|(&c, _)| c)
            .sum();
        let quad: T = self
            .quadratic
            .iter()
            .filter(|(&(j, k), _)| x[j] == 1 && x[k] == 1)
            .map(|(_, &w)| w)
            .sum();
        lin + quad
    }
}

/// `E(s) = sum_j h_j s_j + sum_{j<k} J_jk s_j s_k`; `offset` is not part of `E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingProblem<T> {
    pub h: Vec<T>,
    pub j: Couplings<T>,
    pub offset: T,
}

impl<T: Real> IsingProblem<T> {
    pub fn new(h: Vec<T>, j: Couplings<T>, offset: T) -> Result<Self> {
        let n = h.len();
        for &(a, b) in j.keys() {
            if !(a < b && b < n) {
                return Err(Error::InvalidInstance(format!(
                    "coupling key ({a}, {b}) invalid for {n} spins"
                )));
            }
        }
        Ok(Self { h, j, offset })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            h: vec![T::zero(); n],
            j: Couplings::new(),
            offset: T::zero(),
        }
    }

    pub fn num_spins(&self) -> usize {
        self.h.len()
    }

    /// Energy of a measured bitstring, offset excluded.
    pub fn energy(&self, bits: &[u8]) -> Result<T> {
        if bits.len() != self.h.len() {
            return Err(Error::LengthMismatch {
                expected: self.h.len(),
                got: bits.len(),
            });
        }
        Ok(self.energy_of_index(SpinConvention::index_of_bits(bits)))
    }

    /// Energy of basis index `z`, offset excluded.
    #[inline]
    pub fn energy_of_index(&self, z: usize) -> T {
        let s = |q: usize| -> T { SpinConvention::spin(SpinConvention::bit(z, q)) };
        let field: T = self.h.iter().enumerate().map(|(q, &h)| h * s(q)).sum();
        let coupling: T = self.j.iter().map(|(&(a, b), &c)| c * s(a) * s(b)).sum();
        field + coupling
    }

    /// Energies of all `2^n` basis states, indexed by `z`.
    pub fn energy_table(&self) -> Vec<T> {
        (0..1usize << self.num_spins())
            .map(|z| self.energy_of_index(z))
            .collect()
    }

    /// Multiply every field and coupling (and the offset) by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            h: self.h.iter().map(|&v| v * factor).collect(),
            j: self.j.iter().map(|(&k, &v)| (k, v * factor)).collect(),
            offset: self.offset * factor,
        }
    }

    /// Sum of absolute coefficient values; bounds `|E|`.
    pub fn coefficient_l1(&self) -> T {
        self.h.iter().map(|v| v.abs()).sum::<T>() + self.j.values().map(|v| v.abs()).sum::<T>()
    }
}

/// Expand `||A x - b||^2` into QUBO form.
pub fn encode_qubo<T: Real>(inst: &BllsInstance<T>) -> QuboProblem<T> {
    let (m, n) = (inst.rows(), inst.cols());
    let two = T::lit(2.0);
    let linear = (0..n)
        .map(|j| {
            (0..m)
                .map(|i| {
                    let a = inst.a(i, j);
                    a * (a - two * inst.b()[i])
                })
                .sum()
        })
        .collect();
    let mut quadratic = Couplings::new();
    for j in 0..n {
        for k in j + 1..n {
            let w: T = (0..m).map(|i| inst.a(i, j) * inst.a(i, k)).sum::<T>() * two;
            if w != T::zero() {
                quadratic.insert((j, k), w);
            }
        }
    }
    QuboProblem {
        linear,
        quadratic,
        constant: inst.b_norm_sq(),
    }
}

/// Substitute `x = (s + 1) / 2`. The QUBO constant stays on the QUBO.
pub fn qubo_to_ising<T: Real>(q: &QuboProblem<T>) -> IsingProblem<T> {
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    let mut h: Vec<T> = q.linear.iter().map(|&v| v * half).collect();
    let mut j = Couplings::new();
    let mut offset: T = q.linear.iter().copied().sum::<T>() * half;
    for (&(a, b), &w) in &q.quadratic {
        h[a] += w * quarter;
        h[b] += w * quarter;
        j.insert((a, b), w * quarter);
        offset += w * quarter;
    }
    IsingProblem { h, j, offset }
}

/// A least-squares instance together with both of its encodings.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoding<T> {
    pub qubo: QuboProblem<T>,
    pub ising: IsingProblem<T>,
}

impl<T: Real> Encoding<T> {
    pub fn of(inst: &BllsInstance<T>) -> Self {
        let qubo = encode_qubo(inst);
        let ising = qubo_to_ising(&qubo);
        Self { qubo, ising }
    }

    /// `||A x - b||^2` recovered from an Ising energy.
    pub fn residual_sq_from_energy(&self, energy: T) -> T {
        energy + self.ising.offset + self.qubo.constant
    }
}

/// Exhaustive minimum with every minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStates<T> {
    pub energy: T,
    /// Basis indices of all minimizers, ascending.
    pub states: Vec<usize>,
    pub n: usize,
}

impl<T: Real> GroundStates<T> {
    pub fn contains(&self, z: usize) -> bool {
        self.states.binary_search(&z).is_ok()
    }

    pub fn count(&self) -> usize {
        self.states.len()
    }

    pub fn bits(&self) -> Vec<Vec<u8>> {
        self.states
            .iter()
            .map(|&z| SpinConvention::bits_of_index(z, self.n))
            .collect()
    }

    pub fn variables(&self) -> Vec<Vec<u8>> {
        self.states
            .iter()
            .map(|&z| SpinConvention::variables_of_index(z, self.n))
            .collect()
    }
}

/// Tie tolerance for energies whose terms sum to at most `scale` in magnitude.
pub(crate) fn tie_tolerance<T: Real>(scale: T) -> T {
    T::epsilon() * T::lit(64.0) * scale.max(T::one())
}

fn collect_minimizers<T: Real>(values: impl Iterator<Item = T>, scale: T) -> (T, Vec<usize>) {
    let values: Vec<T> = values.collect();
    let min = values.iter().copied().fold(T::infinity(), T::min);
    let tol = tie_tolerance(scale);
    let states = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v - min <= tol)
        .map(|(z, _)| z)
        .collect();
    (min, states)
}

/// Minimize the Ising energy over all `2^n` bitstrings.
///
/// Minimizers whose energy lies within a few ulps (relative to the coefficient
/// magnitude) of the minimum are all returned.
pub fn brute_force_solve<T: Real>(p: &IsingProblem<T>) -> Result<GroundStates<T>> {
    let n = p.num_spins();
    if n > MAX_BRUTE_FORCE_VARS {
        return Err(Error::TooLarge {
            n,
            limit: MAX_BRUTE_FORCE_VARS,
        });
    }
    let (energy, states) =
        collect_minimizers((0..1usize << n).map(|z| p.energy_of_index(z)), p.coefficient_l1());
    Ok(GroundStates { energy, states, n })
}

/// Minimize `||A x - b||^2` directly over all binary `x`. Returns the minimum
/// and the minimizing basis indices (under [`SpinConvention`]).
pub fn blls_brute_force<T: Real>(inst: &BllsInstance<T>) -> Result<(T, Vec<usize>)> {
    let n = inst.cols();
    if n > MAX_BRUTE_FORCE_VARS {
        return Err(Error::TooLarge {
            n,
            limit: MAX_BRUTE_FORCE_VARS,
        });
    }
    let scale = inst.b_norm_sq()
        + inst.a.iter().map(|v| v.abs()).sum::<T>() * inst.a.iter().map(|v| v.abs()).sum::<T>();
    Ok(collect_minimizers(
        (0..1usize << n).map(|z| inst.residual_sq(&SpinConvention::variables_of_index(z, n))),
        scale,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng as _;

    pub(crate) fn worked_example_instance() -> BllsInstance<f64> {
        BllsInstance::new(
            vec![
                vec![2.0, 1.0, 1.0],
                vec![-1.0, 1.0, -1.0],
                vec![1.0, 2.0, 3.0],
            ],
            vec![3.0, 0.0, 3.0],
            Some(vec![1, 1, 0]),
            InstanceKind::Consistent,
            0,
        )
        .unwrap()
    }

    fn random_instance(m: usize, n: usize, seed: u64) -> BllsInstance<f64> {
        let mut rng = crate::rng::rng_from_seed(seed);
        let rows = (0..m)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let b = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        BllsInstance::new(rows, b, None, InstanceKind::Inconsistent, seed).unwrap()
    }

    #[test]
    fn worked_example_qubo_coefficients() {
        let q = encode_qubo(&worked_example_instance());
        assert_eq!(q.linear, vec![-12.0, -12.0, -13.0]);
        let w: Vec<_> = q.quadratic.iter().map(|(&k, &v)| (k, v)).collect();
        assert_eq!(w, vec![((0, 1), 6.0), ((0, 2), 12.0), ((1, 2), 12.0)]);
        assert_eq!(q.constant, 18.0);
    }

    #[test]
    fn worked_ising_coefficients() {
        let p = qubo_to_ising(&encode_qubo(&worked_example_instance()));
        assert_eq!(p.h, vec![-1.5, -1.5, -0.5]);
        let j: Vec<_> = p.j.iter().map(|(&k, &v)| (k, v)).collect();
        assert_eq!(j, vec![((0, 1), 1.5), ((0, 2), 3.0), ((1, 2), 3.0)]);
        assert_eq!(p.offset, -11.0);
    }

    #[test]
    fn single_variable_expansion() {
        let inst =
            BllsInstance::new(vec![vec![1.0]], vec![1.0], None, InstanceKind::Inconsistent, 0)
                .unwrap();
        let q = encode_qubo(&inst);
        assert_eq!(q.linear, vec![-1.0]);
        assert!(q.quadratic.is_empty());
        assert_eq!(q.constant, 1.0);
    }

    #[test]
    fn zero_qubo_maps_to_zero_ising() {
        let p = qubo_to_ising(&QuboProblem::<f64>::zero(4));
        assert_eq!(p, IsingProblem::zero(4));
    }

    #[test]
    fn worked_example_energies() {
        let p = qubo_to_ising(&encode_qubo(&worked_example_instance()));
        assert_eq!(p.energy(&[0, 0, 1]).unwrap(), -7.0);
        // bits 110 -> spins (-1,-1,+1): 1.5 + 1.5 - 0.5 + 1.5 - 3 - 3
        assert_eq!(p.energy(&[1, 1, 0]).unwrap(), -2.0);
        assert!(matches!(
            p.energy(&[0, 1]),
            Err(Error::LengthMismatch { expected: 3, got: 2 })
        ));
        assert_eq!(IsingProblem::<f64>::zero(3).energy(&[1, 0, 1]).unwrap(), 0.0);
    }

    #[test]
    fn worked_example_ground_state() {
        let p = qubo_to_ising(&encode_qubo(&worked_example_instance()));
        let g = brute_force_solve(&p).unwrap();
        assert_eq!(g.energy, -7.0);
        assert_eq!(g.states, vec![SpinConvention::parse_label("001").unwrap()]);
        assert_eq!(g.variables(), vec![vec![1, 1, 0]]);
    }

    #[test]
    fn zero_problem_all_states_tie() {
        let g = brute_force_solve(&IsingProblem::<f64>::zero(4)).unwrap();
        assert_eq!(g.energy, 0.0);
        assert_eq!(g.count(), 16);
    }

    #[test]
    fn brute_force_guard() {
        let p = IsingProblem::<f64>::zero(MAX_BRUTE_FORCE_VARS + 1);
        assert!(matches!(brute_force_solve(&p), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn qubo_matches_residual_on_random_4x3() {
        let inst = random_instance(4, 3, 7);
        let q = encode_qubo(&inst);
        for z in 0..8 {
            let x = SpinConvention::variables_of_index(z, 3);
            let lhs = q.evaluate(&x) + q.constant;
            assert!((lhs - inst.residual_sq(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn ising_matches_qubo_on_random_5_vars() {
        let mut rng = crate::rng::rng_from_seed(11);
        let mut q = QuboProblem::zero(5);
        for v in q.linear.iter_mut() {
            *v = rng.gen_range(-3.0..3.0);
        }
        for a in 0..5 {
            for b in a + 1..5 {
                q.quadratic.insert((a, b), rng.gen_range(-3.0..3.0));
            }
        }
        let p = qubo_to_ising(&q);
        for x_idx in 0..32usize {
            let x: Vec<u8> = (0..5).map(|j| ((x_idx >> j) & 1) as u8).collect();
            let bits: Vec<u8> = x.iter().map(|&v| 1 - v).collect();
            let lhs: f64 = p.energy(&bits).unwrap() + p.offset;
            assert!((lhs - q.evaluate(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn consistent_instance_validation() {
        let err = BllsInstance::new(
            vec![vec![1.0, 0.0]],
            vec![2.0],
            Some(vec![1, 0]),
            InstanceKind::Consistent,
            0,
        );
        assert!(err.is_err());
        assert!(BllsInstance::<f64>::new(vec![], vec![], None, InstanceKind::Consistent, 0).is_err());
        assert!(BllsInstance::new(
            vec![vec![f64::NAN]],
            vec![0.0],
            None,
            InstanceKind::Inconsistent,
            0
        )
        .is_err());
    }

    #[test]
    fn json_round_trip_and_schema() {
        let inst = worked_example_instance();
        let s = inst.to_json();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        for key in ["m", "n", "A", "b", "x_star", "kind", "seed"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["kind"], "consistent");
        assert_eq!(BllsInstance::<f64>::from_json(&s).unwrap(), inst);
    }

    #[test]
    fn labels_are_qubit_zero_first() {
        assert_eq!(SpinConvention::label(4, 3), "001");
        assert_eq!(SpinConvention::parse_label("001").unwrap(), 4);
        assert_eq!(SpinConvention::index_of_variables(&[1, 1, 0]), 4);
        assert!(SpinConvention::parse_label("0x1").is_err());
    }

    #[test]
    fn f32_encoding_agrees() {
        let inst = BllsInstance::<f32>::from_file(&worked_example_instance().to_file()).unwrap();
        let p = qubo_to_ising(&encode_qubo(&inst));
        assert_eq!(p.offset, -11.0f32);
        assert_eq!(brute_force_solve(&p).unwrap().energy, -7.0f32);
    }

    proptest! {
        #[test]
        fn energy_identity_holds(seed in 0u64..10_000, m in 1usize..6, n in 1usize..7) {
            let inst = random_instance(m, n, seed);
            let enc = Encoding::of(&inst);
            for z in 0..1usize << n {
                let x = SpinConvention::variables_of_index(z, n);
                let r = enc.residual_sq_from_energy(enc.ising.energy_of_index(z));
                prop_assert!((r - inst.residual_sq(&x)).abs() < 1e-9);
            }
        }

        #[test]
        fn encoding_ignores_row_order(seed in 0u64..10_000, rot in 0usize..5) {
            let inst = random_instance(5, 4, seed);
            let order: Vec<usize> = (0..5).map(|i| (i + rot) % 5).rev().collect();
            let a = encode_qubo(&inst);
            let b = encode_qubo(&inst.permute_rows(&order));
            for (x, y) in a.linear.iter().zip(&b.linear) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            for (k, x) in &a.quadratic {
                prop_assert!((x - b.quadratic[k]).abs() < 1e-12);
            }
            prop_assert!((a.constant - b.constant).abs() < 1e-12);
        }

        #[test]
        fn ground_set_invariant_under_positive_scaling(seed in 0u64..10_000, factor in 0.01f64..100.0) {
            let p = Encoding::of(&random_instance(6, 5, seed)).ising;
            let g1 = brute_force_solve(&p).unwrap();
            let g2 = brute_force_solve(&p.scaled(factor)).unwrap();
            prop_assert_eq!(g1.states, g2.states);
        }
    }
}
