//! Dense-matrix reference for small circuits. Everything here is built from
//! textbook definitions (Kronecker products, Pauli algebra and a Taylor
//! matrix exponential) and shares no code with the simulator.

#![allow(dead_code)]

use num_complex::Complex64 as C;
use qlslab::circuit::{Circuit, Gate};
use qlslab::problem::IsingProblem;

pub type Mat = Vec<Vec<C>>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn identity(d: usize) -> Mat {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect())
        .collect()
}

pub fn zeros(d: usize) -> Mat {
    vec![vec![c(0.0, 0.0); d]; d]
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let d = a.len();
    let mut out = zeros(d);
    for i in 0..d {
        for k in 0..d {
            let aik = a[i][k];
            if aik == c(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn scale(a: &Mat, s: C) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (da, db) = (a.len(), b.len());
    let mut out = zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    out[i * db + k][j * db + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn apply(m: &Mat, v: &[C]) -> Vec<C> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn norm1(a: &Mat) -> f64 {
    a.iter()
        .map(|r| r.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(a)` by scaling and squaring with a truncated Taylor series.
pub fn expm(a: &Mat) -> Mat {
    let d = a.len();
    let mut s = 0;
    let mut n = norm1(a);
    while n > 0.5 {
        n /= 2.0;
        s += 1;
    }
    let a = scale(a, c(0.5f64.powi(s), 0.0));
    let mut term = identity(d);
    let mut sum = identity(d);
    for k in 1..30 {
        term = scale(&matmul(&term, &a), c(1.0 / k as f64, 0.0));
        sum = add(&sum, &term);
    }
    for _ in 0..s {
        sum = matmul(&sum, &sum);
    }
    sum
}

pub fn pauli_x() -> Mat {
    vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]
}

pub fn pauli_y() -> Mat {
    vec![vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]
}

pub fn pauli_z() -> Mat {
    vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]]
}

fn projector(bit: usize) -> Mat {
    let mut m = zeros(2);
    m[bit][bit] = c(1.0, 0.0);
    m
}

/// Operator acting with `ops[q]` on the listed qubits and identity elsewhere.
/// Qubit `q` is bit `q` of the basis index, so it sits at Kronecker position
/// `n - 1 - q`.
pub fn on_qubits(n: usize, ops: &[(usize, Mat)]) -> Mat {
    let mut out = identity(1);
    for q in (0..n).rev() {
        let m = ops
            .iter()
            .find(|(k, _)| *k == q)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| identity(2));
        out = kron(&out, &m);
    }
    out
}

pub fn u3(theta: f64, phi: f64, lambda: f64) -> Mat {
    let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    vec![
        vec![c(ct, 0.0), -C::from_polar(st, lambda)],
        vec![C::from_polar(st, phi), C::from_polar(ct, phi + lambda)],
    ]
}

/// `exp(-i angle P / 2)`
fn rotation(p: &Mat, angle: f64) -> Mat {
    expm(&scale(p, c(0.0, -angle / 2.0)))
}

pub fn gate_matrix(n: usize, g: &Gate<f64>) -> Mat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match *g {
        Gate::H(q) => on_qubits(n, &[(q, vec![vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]])]),
        Gate::Rx(q, a) => on_qubits(n, &[(q, rotation(&pauli_x(), a))]),
        Gate::Rz(q, a) => on_qubits(n, &[(q, rotation(&pauli_z(), a))]),
        Gate::U1(q, l) => on_qubits(n, &[(q, vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), C::from_polar(1.0, l)]])]),
        Gate::U2 { qubit, phi, lambda } => on_qubits(n, &[(qubit, u3(std::f64::consts::FRAC_PI_2, phi, lambda))]),
        Gate::U3 { qubit, theta, phi, lambda } => on_qubits(n, &[(qubit, u3(theta, phi, lambda))]),
        Gate::Cnot { control, target } => add(
            &on_qubits(n, &[(control, projector(0))]),
            &on_qubits(n, &[(control, projector(1)), (target, pauli_x())]),
        ),
        Gate::Swap(a, b) => {
            let mut m = identity(1 << n);
            for p in [pauli_x(), pauli_y(), pauli_z()] {
                m = add(&m, &on_qubits(n, &[(a, p.clone()), (b, p)]));
            }
            scale(&m, c(0.5, 0.0))
        }
    }
}

pub fn circuit_unitary(circuit: &Circuit<f64>) -> Mat {
    let n = circuit.n_qubits();
    circuit
        .gates()
        .iter()
        .fold(identity(1 << n), |u, g| matmul(&gate_matrix(n, g), &u))
}

pub fn zero_state(n: usize) -> Vec<C> {
    let mut v = vec![c(0.0, 0.0); 1 << n];
    v[0] = c(1.0, 0.0);
    v
}

pub fn circuit_state(circuit: &Circuit<f64>) -> Vec<C> {
    apply(&circuit_unitary(circuit), &zero_state(circuit.n_qubits()))
}

/// Cost operator `sum h_j Z_j + sum J_jk Z_j Z_k + offset`.
pub fn cost_operator(p: &IsingProblem<f64>) -> Mat {
    let n = p.num_spins();
    let mut m = scale(&identity(1 << n), c(p.offset, 0.0));
    for (q, &h) in p.h.iter().enumerate() {
        m = add(&m, &scale(&on_qubits(n, &[(q, pauli_z())]), c(h, 0.0)));
    }
    for (&(a, b), &j) in &p.j {
        m = add(&m, &scale(&on_qubits(n, &[(a, pauli_z()), (b, pauli_z())]), c(j, 0.0)));
    }
    m
}

pub fn mixer_operator(n: usize) -> Mat {
    (0..n).fold(zeros(1 << n), |m, q| add(&m, &on_qubits(n, &[(q, pauli_x())])))
}

/// `prod_l exp(-i beta_l B) exp(-i gamma_l C) H^n |0>`
pub fn qaoa_state(p: &IsingProblem<f64>, gamma: &[f64], beta: &[f64]) -> Vec<C> {
    let n = p.num_spins();
    let cost = cost_operator(p);
    let mixer = mixer_operator(n);
    let amp = (1.0 / (1u64 << n) as f64).sqrt();
    let mut v = vec![c(amp, 0.0); 1 << n];
    for (&g, &b) in gamma.iter().zip(beta) {
        v = apply(&expm(&scale(&cost, c(0.0, -g))), &v);
        v = apply(&expm(&scale(&mixer, c(0.0, -b))), &v);
    }
    v
}

/// Re-index a physical state to logical order. Physical qubits outside the
/// layout must be in `|0>`; their amplitude mass is dropped.
pub fn to_logical(amps: &[C], layout: &[usize]) -> Vec<C> {
    let n = layout.len();
    (0..1usize << n)
        .map(|l| {
            let phys: usize = (0..n).filter(|&q| l >> q & 1 == 1).map(|q| 1 << layout[q]).sum();
            amps[phys]
        })
        .collect()
}

/// `min_phi || a - e^{i phi} b ||`
pub fn distance_up_to_phase(a: &[C], b: &[C]) -> f64 {
    let inner: C = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let phase = if inner.norm() > 0.0 { inner / inner.norm() } else { c(1.0, 0.0) };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x * phase - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
