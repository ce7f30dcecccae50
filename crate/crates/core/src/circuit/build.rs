use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::problem::IsingProblem;
use crate::qaoa::QaoaParams;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions<T> {
    /// Accept angles outside `gamma in [0, 2pi]`, `beta in [0, pi]`.
    pub allow_out_of_range: bool,
    /// Skip couplings with `|J| <` this value. Off by default.
    pub drop_below: Option<T>,
}

/// H layer, then per layer the cost phases (single-qubit RZ, then one
/// CNOT-RZ-CNOT gadget per coupling in ascending key order) and the RX mixer.
pub fn build_qaoa_circuit<T: Real>(
    problem: &IsingProblem<T>,
    params: &QaoaParams<T>,
    opts: &BuildOptions<T>,
) -> Result<Circuit<T>> {
    if !opts.allow_out_of_range {
        params.check_bounds()?;
    }
    let n = problem.num_spins();
    if n == 0 {
        return Err(Error::InvalidInstance("problem has no spins".into()));
    }
    let two = T::lit(2.0);
    let mut gates = Vec::new();
    gates.extend((0..n).map(Gate::H));
    for (&gamma, &beta) in params.gamma.iter().zip(&params.beta) {
        for (q, &h) in problem.h.iter().enumerate() {
            if h != T::zero() {
                gates.push(Gate::Rz(q, two * h * gamma));
            }
        }
        for (&(a, b), &j) in &problem.j {
            if j == T::zero() || opts.drop_below.is_some_and(|t| j.abs() < t) {
                continue;
            }
            gates.push(Gate::Cnot {
                control: a,
                target: b,
            });
            gates.push(Gate::Rz(b, two * gamma * j));
            gates.push(Gate::Cnot {
                control: a,
                target: b,
            });
        }
        gates.extend((0..n).map(|q| Gate::Rx(q, two * beta)));
    }
    Circuit::from_gates(n, gates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{qubo_to_ising, Couplings, QuboProblem};

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
    fn worked_example_circuit_phases() {
        let (g, b) = (0.4, 0.9);
        let params = QaoaParams::new(vec![g], vec![b]).unwrap();
        let c = build_qaoa_circuit(&worked_ising(), &params, &BuildOptions::default()).unwrap();
        let rz: Vec<f64> = c
            .gates()
            .iter()
            .filter_map(|g| match g {
                Gate::Rz(_, a) => Some(*a),
                _ => None,
            })
            .collect();
        let expect = [-3.0 * g, -3.0 * g, -g, 3.0 * g, 6.0 * g, 6.0 * g];
        assert_eq!(rz.len(), 6);
        for (x, y) in rz.iter().zip(expect) {
            assert!((x - y).abs() < 1e-15);
        }
        let rx: Vec<_> = c.gates().iter().filter(|g| matches!(g, Gate::Rx(..))).collect();
        assert_eq!(rx, vec![&Gate::Rx(0, 2.0 * b), &Gate::Rx(1, 2.0 * b), &Gate::Rx(2, 2.0 * b)]);
        assert_eq!(c.gates()[3], Gate::Rz(0, -3.0 * g));
        assert_eq!(
            c.gates()[6..9],
            [
                Gate::Cnot { control: 0, target: 1 },
                Gate::Rz(1, 3.0 * g),
                Gate::Cnot { control: 0, target: 1 }
            ]
        );
    }

    #[test]
    fn zero_problem_has_no_cost_gates() {
        let params = QaoaParams::new(vec![1.0], vec![0.5]).unwrap();
        let c = build_qaoa_circuit(&IsingProblem::zero(3), &params, &BuildOptions::default())
            .unwrap();
        assert_eq!(c.len(), 6);
        assert!(c.gates()[..3].iter().all(|g| matches!(g, Gate::H(_))));
        assert!(c.gates()[3..].iter().all(|g| matches!(g, Gate::Rx(_, a) if *a == 1.0)));
    }

    #[test]
    fn angle_bounds_enforced() {
        let params = QaoaParams::new(vec![7.0], vec![0.5]).unwrap();
        let p = worked_ising();
        assert!(matches!(
            build_qaoa_circuit(&p, &params, &BuildOptions::default()),
            Err(Error::AngleOutOfBounds(_))
        ));
        let opts = BuildOptions {
            allow_out_of_range: true,
            drop_below: None,
        };
        assert!(build_qaoa_circuit(&p, &params, &opts).is_ok());
    }

    #[test]
    fn small_couplings_can_be_dropped() {
        let params = QaoaParams::new(vec![1.0], vec![0.5]).unwrap();
        let opts = BuildOptions {
            allow_out_of_range: false,
            drop_below: Some(2.0),
        };
        let c = build_qaoa_circuit(&worked_ising(), &params, &opts).unwrap();
        let cnots = c.gates().iter().filter(|g| matches!(g, Gate::Cnot { .. })).count();
        assert_eq!(cnots, 4);
    }
}
