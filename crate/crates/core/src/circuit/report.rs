use std::collections::BTreeMap;

use serde::Serialize;

use crate::circuit::Circuit;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CircuitReport {
    pub counts: BTreeMap<String, usize>,
    pub two_qubit: usize,
    pub total: usize,
    /// Longest chain of gates that share a qubit.
    pub depth: usize,
}

pub fn depth_and_counts<T: Real>(c: &Circuit<T>) -> CircuitReport {
    let mut counts = BTreeMap::new();
    let mut level = vec![0usize; c.n_qubits()];
    let mut two_qubit = 0;
    for g in c.gates() {
        *counts.entry(g.name().to_string()).or_insert(0) += 1;
        match g.qubits() {
            (a, Some(b)) => {
                two_qubit += 1;
                let l = level[a].max(level[b]) + 1;
                level[a] = l;
                level[b] = l;
            }
            (a, None) => level[a] += 1,
        }
    }
    CircuitReport {
        counts,
        two_qubit,
        total: c.len(),
        depth: level.into_iter().max().unwrap_or(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    #[test]
    fn hadamard_layer() {
        let c = Circuit::<f64>::from_gates(3, (0..3).map(Gate::H).collect()).unwrap();
        let r = depth_and_counts(&c);
        assert_eq!(r.depth, 1);
        assert_eq!(r.counts, BTreeMap::from([("H".to_string(), 3)]));
        assert_eq!(r.two_qubit, 0);
    }

    #[test]
    fn two_qubit_gates_synchronise_levels() {
        let c = Circuit::<f64>::from_gates(
            3,
            vec![
                Gate::H(0),
                Gate::H(0),
                Gate::Cnot { control: 0, target: 1 },
                Gate::H(2),
            ],
        )
        .unwrap();
        assert_eq!(depth_and_counts(&c).depth, 3);
        assert_eq!(depth_and_counts(&Circuit::<f64>::new(2)).depth, 0);
    }
}
