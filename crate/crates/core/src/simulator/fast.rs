use crate::circuit::Gate;
use crate::error::Result;
use crate::problem::IsingProblem;
use crate::qaoa::QaoaParams;
use crate::scalar::Real;
use crate::simulator::{check_budget, expectation_with_table, StateVector};

/// QAOA state preparation that applies each cost layer as one diagonal phase
/// `e^{-i gamma E(z)}` over a cached energy table, followed by the RX mixer.
///
/// Since every cost term is diagonal and they commute, this equals the gate
/// path exactly, including global phase.
#[derive(Debug, Clone)]
pub struct FastQaoa<T> {
    n: usize,
    energies: Vec<T>,
}

impl<T: Real> FastQaoa<T> {
    pub fn new(problem: &IsingProblem<T>) -> Result<Self> {
        check_budget(problem.num_spins())?;
        Ok(Self {
            n: problem.num_spins(),
            energies: problem.energy_table(),
        })
    }

    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn state(&self, params: &QaoaParams<T>) -> StateVector<T> {
        let mut s = StateVector::uniform(self.n).expect("budget checked");
        let two = T::lit(2.0);
        for (&gamma, &beta) in params.gamma.iter().zip(&params.beta) {
            s.apply_phase_table(gamma, &self.energies);
            for q in 0..self.n {
                s.apply(&Gate::Rx(q, two * beta)).expect("qubit in range");
            }
        }
        s
    }

    pub fn expectation(&self, params: &QaoaParams<T>) -> T {
        expectation_with_table(&self.energies, &self.state(params))
    }
}

pub fn qaoa_state_fast<T: Real>(
    problem: &IsingProblem<T>,
    params: &QaoaParams<T>,
) -> Result<StateVector<T>> {
    Ok(FastQaoa::new(problem)?.state(params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_qaoa_circuit, BuildOptions};
    use crate::simulator::tests::worked_ising;
    use crate::simulator::{expectation_exact, simulate};
    use rand::Rng;

    #[test]
    fn zero_angles_give_uniform_state() {
        let p = worked_ising();
        let s = qaoa_state_fast(&p, &QaoaParams::new(vec![0.0], vec![0.0]).unwrap()).unwrap();
        let u = StateVector::uniform(3).unwrap();
        assert!(s.distance_up_to_phase(&u) < 1e-15);
    }

    #[test]
    fn zero_problem_stays_uniform_in_probability() {
        let p = IsingProblem::<f64>::zero(4);
        let params = QaoaParams::new(vec![1.1, 2.0], vec![0.3, 2.5]).unwrap();
        let s = qaoa_state_fast(&p, &params).unwrap();
        for pr in s.probabilities() {
            assert!((pr - 1.0 / 16.0).abs() < 1e-12);
        }
    }

    #[test]
    fn agrees_with_gate_path_on_worked_example() {
        let p = worked_ising();
        let mut rng = crate::rng::rng_from_seed(5);
        for _ in 0..20 {
            let params = QaoaParams::new(
                vec![rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(0.0..6.28)],
                vec![rng.gen_range(0.0..std::f64::consts::PI), rng.gen_range(0.0..3.14)],
            )
            .unwrap();
            let fast = qaoa_state_fast(&p, &params).unwrap();
            let slow = simulate(&build_qaoa_circuit(&p, &params, &BuildOptions::default()).unwrap())
                .unwrap();
            assert!(fast.distance_up_to_phase(&slow) < 1e-10);
            let e1 = FastQaoa::new(&p).unwrap().expectation(&params);
            let e2 = expectation_exact(&p, &slow).unwrap();
            assert!((e1 - e2).abs() < 1e-10);
        }
    }
}
