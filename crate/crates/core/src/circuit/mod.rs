//! Gate-level circuits: QAOA construction, SWAP routing, basis rewriting and
//! a line-oriented text format.

mod basis;
mod build;
mod report;
mod route;
mod text;

pub use basis::rewrite_basis;
pub use build::{build_qaoa_circuit, BuildOptions};
pub use report::{depth_and_counts, CircuitReport};
pub use route::{route, route_with, CouplingMap, CouplingMapKind, RoutingStrategy};
pub use text::{parse_circuit, write_circuit};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate<T> {
    H(usize),
    Rx(usize, T),
    Rz(usize, T),
    /// `diag(1, e^{i lambda})`
    U1(usize, T),
    U2 {
        qubit: usize,
        phi: T,
        lambda: T,
    },
    U3 {
        qubit: usize,
        theta: T,
        phi: T,
        lambda: T,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Swap(usize, usize),
}

impl<T: Real> Gate<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::Rx(..) => "RX",
            Gate::Rz(..) => "RZ",
            Gate::U1(..) => "U1",
            Gate::U2 { .. } => "U2",
            Gate::U3 { .. } => "U3",
            Gate::Cnot { .. } => "CNOT",
            Gate::Swap(..) => "SWAP",
        }
    }

    /// Qubits acted on; the second slot is set for two-qubit gates.
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(q) | Gate::Rx(q, _) | Gate::Rz(q, _) | Gate::U1(q, _) => (q, None),
            Gate::U2 { qubit, .. } | Gate::U3 { qubit, .. } => (qubit, None),
            Gate::Cnot { control, target } => (control, Some(target)),
            Gate::Swap(a, b) => (a, Some(b)),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits().1.is_some()
    }

    fn angles(&self) -> Vec<T> {
        match *self {
            Gate::Rx(_, a) | Gate::Rz(_, a) | Gate::U1(_, a) => vec![a],
            Gate::U2 { phi, lambda, .. } => vec![phi, lambda],
            Gate::U3 {
                theta, phi, lambda, ..
            } => vec![theta, phi, lambda],
            _ => Vec::new(),
        }
    }

    /// Same gate with its qubit indices passed through `f`.
    pub fn map_qubits(&self, f: impl Fn(usize) -> usize) -> Self {
        match *self {
            Gate::H(q) => Gate::H(f(q)),
            Gate::Rx(q, a) => Gate::Rx(f(q), a),
            Gate::Rz(q, a) => Gate::Rz(f(q), a),
            Gate::U1(q, a) => Gate::U1(f(q), a),
            Gate::U2 { qubit, phi, lambda } => Gate::U2 {
                qubit: f(qubit),
                phi,
                lambda,
            },
            Gate::U3 {
                qubit,
                theta,
                phi,
                lambda,
            } => Gate::U3 {
                qubit: f(qubit),
                theta,
                phi,
                lambda,
            },
            Gate::Cnot { control, target } => Gate::Cnot {
                control: f(control),
                target: f(target),
            },
            Gate::Swap(a, b) => Gate::Swap(f(a), f(b)),
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let (a, b) = self.qubits();
        if a >= n_qubits || b.is_some_and(|b| b >= n_qubits) {
            return Err(Error::InvalidGate(format!(
                "{} on qubit out of range for {n_qubits} qubits",
                self.name()
            )));
        }
        if b == Some(a) {
            return Err(Error::InvalidGate(format!(
                "{} with repeated qubit {a}",
                self.name()
            )));
        }
        if self.angles().iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGate(format!("{} with non-finite angle", self.name())));
        }
        Ok(())
    }
}

/// Ordered gate list plus the logical-to-physical layout reached at the end.
///
/// `layout[q]` is the qubit that holds logical qubit `q` when the circuit
/// finishes. Only the first `logical_qubits` entries are measured.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<T> {
    n_qubits: usize,
    logical_qubits: usize,
    gates: Vec<Gate<T>>,
    layout: Vec<usize>,
}

impl<T: Real> Circuit<T> {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            logical_qubits: n_qubits,
            gates: Vec::new(),
            layout: (0..n_qubits).collect(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate<T>>) -> Result<Self> {
        let mut c = Self::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub(crate) fn with_layout(
        n_qubits: usize,
        logical_qubits: usize,
        gates: Vec<Gate<T>>,
        layout: Vec<usize>,
    ) -> Result<Self> {
        let mut seen = vec![false; n_qubits];
        if layout.len() != n_qubits || logical_qubits > n_qubits {
            return Err(Error::InvalidGate("layout length mismatch".into()));
        }
        for &p in &layout {
            if p >= n_qubits || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidGate("layout is not a permutation".into()));
            }
        }
        for g in &gates {
            g.validate(n_qubits)?;
        }
        Ok(Self {
            n_qubits,
            logical_qubits,
            gates,
            layout,
        })
    }

    pub fn push(&mut self, gate: Gate<T>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn logical_qubits(&self) -> usize {
        self.logical_qubits
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn layout(&self) -> &[usize] {
        &self.layout
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    /// Logical basis index read out of a physical basis index.
    pub fn logical_index(&self, physical: usize) -> usize {
        (0..self.logical_qubits).fold(0, |z, q| z | (((physical >> self.layout[q]) & 1) << q))
    }

    /// Physical basis index holding logical index `logical`, other qubits zero.
    pub fn physical_index(&self, logical: usize) -> usize {
        (0..self.logical_qubits).fold(0, |z, q| z | (((logical >> q) & 1) << self.layout[q]))
    }

    /// Replace every SWAP by three CNOTs.
    pub fn expand_swaps(&self) -> Self {
        let gates = self
            .gates
            .iter()
            .flat_map(|g| match *g {
                Gate::Swap(a, b) => swap_as_cnots(a, b).to_vec(),
                other => vec![other],
            })
            .collect();
        Self {
            gates,
            ..self.clone()
        }
    }
}

pub(crate) fn swap_as_cnots<T>(a: usize, b: usize) -> [Gate<T>; 3] {
    [
        Gate::Cnot {
            control: a,
            target: b,
        },
        Gate::Cnot {
            control: b,
            target: a,
        },
        Gate::Cnot {
            control: a,
            target: b,
        },
    ]
}
