use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};
use crate::scalar::Real;
use crate::simulator::sampling::Sampler;
use crate::simulator::{simulate, Pauli, SampleSet, StateVector};

const NOISE_STREAM: u64 = 0x6e6f_6973_65; // "noise"

/// Stochastic Pauli gate noise plus independent readout flips.
///
/// Effective rates are `base * scale`. After a single-qubit gate, with
/// probability `p1` the qubit receives a uniformly random X, Y or Z; after a
/// two-qubit gate, with probability `p2` each of its two qubits does. Every
/// measured bit flips with probability `p_ro`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    pub p_ro: f64,
    pub scale: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            p1: 0.001,
            p2: 0.02,
            p_ro: 0.02,
            scale: 1.0,
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            scale: 0.0,
            ..Self::default()
        }
    }

    pub fn with_scale(self, scale: f64) -> Self {
        Self { scale, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale >= 0.0) {
            return Err(Error::InvalidProbability(format!("scale {}", self.scale)));
        }
        for (name, p) in [("p1", self.p1), ("p2", self.p2), ("p_ro", self.p_ro)] {
            let eff = p * self.scale;
            if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&eff) {
                return Err(Error::InvalidProbability(format!(
                    "{name} = {p} at scale {} gives {eff}",
                    self.scale
                )));
            }
        }
        Ok(())
    }

    /// `(p1, p2, p_ro)` after scaling.
    pub fn effective(&self) -> (f64, f64, f64) {
        (
            self.p1 * self.scale,
            self.p2 * self.scale,
            self.p_ro * self.scale,
        )
    }
}

/// Sample `c` under `nm`, one trajectory per shot. Counts are reported in
/// the circuit's logical qubit order.
///
/// Measurement draws come from the stream seeded by `seed` exactly as in
/// [`sample`](crate::simulator::sample), one uniform per shot; noise draws
/// come from a separate derived stream and are consumed at a fixed rate per
/// shot regardless of `scale`. Consequently `scale = 0` reproduces noiseless
/// sampling exactly, and the fault sets at two scales are nested.
pub fn simulate_noisy<T: Real>(
    c: &Circuit<T>,
    nm: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<SampleSet> {
    nm.validate()?;
    if shots == 0 {
        return Err(Error::InvalidConfig("shots must be at least 1".into()));
    }
    let (p1, p2, p_ro) = nm.effective();
    let ideal = simulate(c)?;
    let ideal_sampler = Sampler::new(&ideal.probabilities());
    let mut meas_rng = rng_from_seed(seed);
    let mut noise_rng = rng_from_seed(derive_seed(seed, &[NOISE_STREAM]));
    let mut out = SampleSet::new(c.logical_qubits());
    let mut faults: Vec<(usize, usize, Pauli)> = Vec::new();
    const PAULIS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    for _ in 0..shots {
        faults.clear();
        for (gi, g) in c.gates().iter().enumerate() {
            let u: f64 = noise_rng.gen();
            let (a, b) = g.qubits();
            let pa = PAULIS[noise_rng.gen_range(0..3)];
            let pb = PAULIS[noise_rng.gen_range(0..3)];
            let p = if b.is_some() { p2 } else { p1 };
            if u < p {
                faults.push((gi, a, pa));
                if let Some(b) = b {
                    faults.push((gi, b, pb));
                }
            }
        }
        let mut flip = 0usize;
        for q in 0..c.n_qubits() {
            if noise_rng.gen::<f64>() < p_ro {
                flip |= 1 << q;
            }
        }
        let z = if faults.is_empty() {
            ideal_sampler.draw(&mut meas_rng)
        } else {
            let traj = run_with_faults(c, &faults)?;
            Sampler::new(&traj.probabilities()).draw(&mut meas_rng)
        };
        out.add(c.logical_index(z ^ flip), 1);
    }
    Ok(out)
}

fn run_with_faults<T: Real>(
    c: &Circuit<T>,
    faults: &[(usize, usize, Pauli)],
) -> Result<StateVector<T>> {
    let mut s = StateVector::zero_state(c.n_qubits())?;
    let mut next = faults.iter().peekable();
    for (gi, g) in c.gates().iter().enumerate() {
        s.apply(g)?;
        while let Some(&&(fg, q, p)) = next.peek() {
            if fg != gi {
                break;
            }
            s.apply_pauli(q, p);
            next.next();
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_qaoa_circuit, BuildOptions, Gate};
    use crate::qaoa::QaoaParams;
    use crate::simulator::sample;
    use crate::simulator::tests::worked_ising;

    fn worked_example_circuit() -> Circuit<f64> {
        let params = QaoaParams::new(vec![0.35], vec![2.6]).unwrap();
        build_qaoa_circuit(&worked_ising(), &params, &BuildOptions::default()).unwrap()
    }

    #[test]
    fn zero_scale_matches_noiseless_sampling() {
        let c = worked_example_circuit();
        let noisy = simulate_noisy(&c, &NoiseModel::noiseless(), 4096, 77).unwrap();
        let clean = sample(&simulate(&c).unwrap(), 4096, 77).unwrap();
        assert_eq!(noisy, clean);
    }

    #[test]
    fn forced_readout_flips() {
        let c = Circuit::<f64>::from_gates(3, vec![Gate::Rz(0, 0.0)]).unwrap();
        let nm = NoiseModel {
            p1: 0.0,
            p2: 0.0,
            p_ro: 1.0,
            scale: 1.0,
        };
        let s = simulate_noisy(&c, &nm, 200, 3).unwrap();
        assert_eq!(s.count(0b111), 200);
    }

    #[test]
    fn invalid_probabilities_rejected() {
        let c = worked_example_circuit();
        let bad = NoiseModel {
            p2: 0.6,
            scale: 2.0,
            ..NoiseModel::default()
        };
        assert!(matches!(
            simulate_noisy(&c, &bad, 10, 0),
            Err(Error::InvalidProbability(_))
        ));
        assert!(NoiseModel::default().with_scale(-1.0).validate().is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let c = worked_example_circuit();
        let nm = NoiseModel::default().with_scale(4.0);
        assert_eq!(
            simulate_noisy(&c, &nm, 500, 12).unwrap(),
            simulate_noisy(&c, &nm, 500, 12).unwrap()
        );
    }

    #[test]
    fn full_depolarizing_pushes_toward_uniform() {
        let c = worked_example_circuit();
        let nm = NoiseModel {
            p1: 1.0,
            p2: 1.0,
            p_ro: 0.0,
            scale: 1.0,
        };
        let s = simulate_noisy(&c, &nm, 4000, 5).unwrap();
        let clean = simulate(&c).unwrap().probabilities();
        let uniform = vec![1.0 / 8.0; 8];
        assert!(s.total_variation(&uniform) < s.total_variation(&clean));
    }
}
