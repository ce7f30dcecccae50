use crate::circuit::{swap_as_cnots, Circuit, Gate};
use crate::scalar::Real;

fn u3<T: Real>(qubit: usize, theta: T, phi: T, lambda: T) -> Gate<T> {
    Gate::U3 {
        qubit,
        theta,
        phi,
        lambda,
    }
}

/// Rewrite into `{U1, U3, CNOT}`.
///
/// `RZ(w)` becomes `U1(w/2) U3(pi,0,pi) U1(-w/2) U3(pi,0,pi)` in time order,
/// which is exact (no global phase). `H` and `RX` map to a single `U3`, and
/// `SWAP` to three alternating CNOTs. `U2(phi, lambda)` is `U3(pi/2, phi, lambda)`.
pub fn rewrite_basis<T: Real>(c: &Circuit<T>) -> Circuit<T> {
    let pi = T::PI();
    let half = T::lit(0.5);
    let mut gates = Vec::with_capacity(c.len() * 2);
    for &g in c.gates() {
        match g {
            Gate::H(q) => gates.push(u3(q, pi * half, T::zero(), pi)),
            Gate::Rx(q, w) => gates.push(u3(q, w, -pi * half, pi * half)),
            Gate::Rz(q, w) => gates.extend([
                Gate::U1(q, w * half),
                u3(q, pi, T::zero(), pi),
                Gate::U1(q, -w * half),
                u3(q, pi, T::zero(), pi),
            ]),
            Gate::U2 { qubit, phi, lambda } => gates.push(u3(qubit, pi * half, phi, lambda)),
            Gate::Swap(a, b) => gates.extend(swap_as_cnots(a, b)),
            Gate::U1(..) | Gate::U3 { .. } | Gate::Cnot { .. } => gates.push(g),
        }
    }
    Circuit {
        gates,
        ..c.clone()
    }
}
