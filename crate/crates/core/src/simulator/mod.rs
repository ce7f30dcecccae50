//! Statevector simulation.
//!
//! Amplitude index `z` holds basis state `|z>` where bit `j` of `z` is the
//! value of qubit `j`.

mod fast;
mod noise;
mod sampling;

pub use fast::{qaoa_state_fast, FastQaoa};
pub use noise::{simulate_noisy, NoiseModel};
pub use sampling::{expectation_from_samples, sample, SampleSet};

use num_complex::Complex;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::problem::IsingProblem;
use crate::scalar::Real;

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 20;

pub(crate) fn check_budget(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        Err(Error::QubitBudget {
            n,
            limit: MAX_QUBITS,
        })
    } else {
        Ok(())
    }
}

type Mat2<T> = [[Complex<T>; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// `|0...0>`
    pub fn zero_state(n: usize) -> Result<Self> {
        check_budget(n)?;
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n];
        amps[0] = Complex::new(T::one(), T::zero());
        Ok(Self { n, amps })
    }

    /// `H^{(x)n} |0...0>`
    pub fn uniform(n: usize) -> Result<Self> {
        check_budget(n)?;
        let a = T::one() / T::from_usize_lossy(1 << n).sqrt();
        Ok(Self {
            n,
            amps: vec![Complex::new(a, T::zero()); 1 << n],
        })
    }

    pub fn basis(n: usize, z: usize) -> Result<Self> {
        let mut s = Self::zero_state(n)?;
        s.amps.swap(0, z);
        Ok(s)
    }

    /// Wrap raw amplitudes; they must be normalized to 1e-9.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::LengthMismatch {
                expected: len.next_power_of_two(),
                got: len,
            });
        }
        let s = Self {
            n: len.trailing_zeros() as usize,
            amps,
        };
        check_budget(s.n)?;
        if (s.norm_sq() - T::one()).abs() > T::lit(1e-9).max(T::epsilon() * T::lit(64.0)) {
            return Err(Error::InvalidInstance("state is not normalized".into()));
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sq(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            })
    }

    /// Max amplitude difference after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &Self) -> T {
        let ov = self.inner(other);
        let phase = if ov.norm() > T::zero() {
            ov / Complex::new(ov.norm(), T::zero())
        } else {
            Complex::new(T::one(), T::zero())
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (*a * phase - *b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn apply(&mut self, gate: &Gate<T>) -> Result<()> {
        gate.validate(self.n)?;
        let half = T::lit(0.5);
        match *gate {
            Gate::H(q) => {
                let r = T::FRAC_1_SQRT_2();
                let c = Complex::new(r, T::zero());
                self.apply_1q(q, [[c, c], [c, -c]]);
            }
            Gate::Rx(q, w) => {
                let (s, c) = (w * half).sin_cos();
                let cc = Complex::new(c, T::zero());
                let ms = Complex::new(T::zero(), -s);
                self.apply_1q(q, [[cc, ms], [ms, cc]]);
            }
            Gate::Rz(q, w) => {
                let p0 = Complex::from_polar(T::one(), -w * half);
                self.apply_diag_1q(q, p0, p0.conj());
            }
            Gate::U1(q, l) => {
                self.apply_diag_1q(q, Complex::new(T::one(), T::zero()), Complex::from_polar(T::one(), l));
            }
            Gate::U2 { qubit, phi, lambda } => {
                self.apply_1q(qubit, u3_matrix(T::FRAC_PI_2(), phi, lambda));
            }
            Gate::U3 {
                qubit,
                theta,
                phi,
                lambda,
            } => self.apply_1q(qubit, u3_matrix(theta, phi, lambda)),
            Gate::Cnot { control, target } => {
                let (cm, tm) = (1usize << control, 1usize << target);
                for z in 0..self.amps.len() {
                    if z & cm != 0 && z & tm == 0 {
                        self.amps.swap(z, z | tm);
                    }
                }
            }
            Gate::Swap(a, b) => {
                let (am, bm) = (1usize << a, 1usize << b);
                for z in 0..self.amps.len() {
                    if z & am != 0 && z & bm == 0 {
                        self.amps.swap(z, (z & !am) | bm);
                    }
                }
            }
        }
        Ok(())
    }

    pub(crate) fn apply_pauli(&mut self, q: usize, p: Pauli) {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        match p {
            Pauli::X => self.apply_1q(q, [[zero, one], [one, zero]]),
            Pauli::Y => self.apply_1q(q, [[zero, -i], [i, zero]]),
            Pauli::Z => self.apply_diag_1q(q, one, -one),
        }
    }

    fn apply_1q(&mut self, q: usize, m: Mat2<T>) {
        let mask = 1usize << q;
        for z in 0..self.amps.len() {
            if z & mask == 0 {
                let (a0, a1) = (self.amps[z], self.amps[z | mask]);
                self.amps[z] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[z | mask] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_diag_1q(&mut self, q: usize, d0: Complex<T>, d1: Complex<T>) {
        let mask = 1usize << q;
        for (z, a) in self.amps.iter_mut().enumerate() {
            *a = *a * if z & mask == 0 { d0 } else { d1 };
        }
    }

    /// Multiply amplitude `z` by `e^{-i angle * values[z]}`.
    pub(crate) fn apply_phase_table(&mut self, angle: T, values: &[T]) {
        for (a, &v) in self.amps.iter_mut().zip(values) {
            *a = *a * Complex::from_polar(T::one(), -angle * v);
        }
    }

    /// Basis-state probabilities re-indexed by logical qubit order of `c`.
    pub fn logical_probabilities(&self, c: &Circuit<T>) -> Vec<T> {
        let mut out = vec![T::zero(); 1 << c.logical_qubits()];
        for (z, a) in self.amps.iter().enumerate() {
            out[c.logical_index(z)] += a.norm_sqr();
        }
        out
    }
}

fn u3_matrix<T: Real>(theta: T, phi: T, lambda: T) -> Mat2<T> {
    let (s, c) = (theta * T::lit(0.5)).sin_cos();
    let e = |x: T| Complex::from_polar(T::one(), x);
    [
        [Complex::new(c, T::zero()), -e(lambda) * s],
        [e(phi) * s, e(lambda + phi) * c],
    ]
}

/// Run `c` from `|0...0>`.
pub fn simulate<T: Real>(c: &Circuit<T>) -> Result<StateVector<T>> {
    let mut s = StateVector::zero_state(c.n_qubits())?;
    for g in c.gates() {
        s.apply(g)?;
    }
    Ok(s)
}

/// `sum_z |psi_z|^2 E(z)`, offset excluded.
pub fn expectation_exact<T: Real>(p: &IsingProblem<T>, state: &StateVector<T>) -> Result<T> {
    if p.num_spins() != state.num_qubits() {
        return Err(Error::LengthMismatch {
            expected: p.num_spins(),
            got: state.num_qubits(),
        });
    }
    Ok(state
        .amps
        .iter()
        .enumerate()
        .map(|(z, a)| a.norm_sqr() * p.energy_of_index(z))
        .sum())
}

/// Same as [`expectation_exact`] with a precomputed energy table.
pub fn expectation_with_table<T: Real>(energies: &[T], state: &StateVector<T>) -> T {
    state
        .amps
        .iter()
        .zip(energies)
        .map(|(a, &e)| a.norm_sqr() * e)
        .sum()
}
