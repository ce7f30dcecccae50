use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{IsingProblem, SpinConvention};
use crate::rng::{rng_from_seed, Rng};
use crate::scalar::Real;
use crate::simulator::StateVector;

/// Measurement outcomes keyed by basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet {
    n: usize,
    counts: BTreeMap<usize, u64>,
    shots: u64,
}

#[derive(Serialize, Deserialize)]
struct SampleSetFile {
    shots: u64,
    counts: BTreeMap<String, u64>,
}

impl SampleSet {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            counts: BTreeMap::new(),
            shots: 0,
        }
    }

    pub fn from_counts(n: usize, counts: impl IntoIterator<Item = (usize, u64)>) -> Self {
        let mut s = Self::new(n);
        for (z, c) in counts {
            s.add(z, c);
        }
        s
    }

    pub fn add(&mut self, z: usize, count: u64) {
        if count > 0 {
            *self.counts.entry(z).or_insert(0) += count;
            self.shots += count;
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn count(&self, z: usize) -> u64 {
        self.counts.get(&z).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.shots == 0
    }

    /// `0.5 * sum_z |freq(z) - probs[z]|`
    pub fn total_variation<T: Real>(&self, probs: &[T]) -> f64 {
        let shots = self.shots.max(1) as f64;
        0.5 * probs
            .iter()
            .enumerate()
            .map(|(z, p)| (self.count(z) as f64 / shots - p.as_f64()).abs())
            .sum::<f64>()
    }

    /// Lowest energy among observed bitstrings.
    pub fn best_energy<T: Real>(&self, p: &IsingProblem<T>) -> Option<T> {
        self.counts
            .keys()
            .map(|&z| p.energy_of_index(z))
            .reduce(T::min)
    }

    pub fn to_json(&self) -> String {
        let file = SampleSetFile {
            shots: self.shots,
            counts: self
                .counts
                .iter()
                .map(|(&z, &c)| (SpinConvention::label(z, self.n), c))
                .collect(),
        };
        serde_json::to_string(&file).expect("sample set serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: SampleSetFile = serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        let n = file.counts.keys().map(String::len).max().unwrap_or(0);
        let mut out = Self::new(n);
        for (label, c) in &file.counts {
            if label.len() != n {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("bitstring {label:?} has inconsistent width"),
                });
            }
            out.add(SpinConvention::parse_label(label)?, *c);
        }
        if out.shots != file.shots {
            return Err(Error::Parse {
                line: 0,
                msg: format!("counts sum to {} but shots is {}", out.shots, file.shots),
            });
        }
        Ok(out)
    }
}

/// Inverse-CDF categorical sampler: one uniform per draw.
#[derive(Debug, Clone)]
pub(crate) struct Sampler {
    cdf: Vec<f64>,
}

impl Sampler {
    pub fn new<T: Real>(probs: &[T]) -> Self {
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p.as_f64().max(0.0);
                acc
            })
            .collect();
        Self { cdf }
    }

    pub fn draw(&self, rng: &mut Rng) -> usize {
        let total = *self.cdf.last().unwrap_or(&0.0);
        let u = rng.gen::<f64>() * total;
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len().saturating_sub(1))
    }
}

/// Draw `shots` measurements of `state` in the computational basis.
pub fn sample<T: Real>(state: &StateVector<T>, shots: u64, seed: u64) -> Result<SampleSet> {
    if shots == 0 {
        return Err(Error::InvalidConfig("shots must be at least 1".into()));
    }
    let sampler = Sampler::new(&state.probabilities());
    let mut rng = rng_from_seed(seed);
    let mut tally = vec![0u64; 1 << state.num_qubits()];
    for _ in 0..shots {
        tally[sampler.draw(&mut rng)] += 1;
    }
    Ok(SampleSet::from_counts(
        state.num_qubits(),
        tally.into_iter().enumerate(),
    ))
}

/// Count-weighted mean energy of the observed bitstrings, offset excluded.
pub fn expectation_from_samples<T: Real>(p: &IsingProblem<T>, s: &SampleSet) -> Result<T> {
    if s.is_empty() {
        return Err(Error::Empty("sample set"));
    }
    if s.num_qubits() != p.num_spins() {
        return Err(Error::LengthMismatch {
            expected: p.num_spins(),
            got: s.num_qubits(),
        });
    }
    let total: T = s
        .counts
        .iter()
        .map(|(&z, &c)| p.energy_of_index(z) * T::lit(c as f64))
        .sum();
    Ok(total / T::lit(s.shots as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::tests::worked_ising;
    use crate::simulator::{expectation_exact, qaoa_state_fast};
    use crate::qaoa::QaoaParams;

    #[test]
    fn basis_state_gives_single_outcome() {
        let s = StateVector::<f64>::basis(3, 5).unwrap();
        let set = sample(&s, 1000, 1).unwrap();
        assert_eq!(set.counts().len(), 1);
        assert_eq!(set.count(5), 1000);
        assert!(sample(&s, 0, 1).is_err());
    }

    #[test]
    fn uniform_frequencies_within_five_sigma() {
        let s = StateVector::<f64>::uniform(3).unwrap();
        let shots = 80_000u64;
        let set = sample(&s, shots, 42).unwrap();
        let p = 1.0 / 8.0;
        let sigma = (shots as f64 * p * (1.0 - p)).sqrt();
        for z in 0..8 {
            let dev = (set.count(z) as f64 - shots as f64 * p).abs();
            assert!(dev < 5.0 * sigma, "z={z} dev={dev} sigma={sigma}");
        }
    }

    #[test]
    fn sample_mean_tracks_exact_expectation() {
        let p = worked_ising();
        let params = QaoaParams::new(vec![0.35], vec![2.6]).unwrap();
        let state = qaoa_state_fast(&p, &params).unwrap();
        let exact = expectation_exact(&p, &state).unwrap();
        let var: f64 = state
            .probabilities()
            .iter()
            .enumerate()
            .map(|(z, pr)| pr * (p.energy_of_index(z) - exact).powi(2))
            .sum();
        let shots = 20_000;
        let est = expectation_from_samples(&p, &sample(&state, shots, 9).unwrap()).unwrap();
        assert!((est - exact).abs() < 5.0 * (var / shots as f64).sqrt());
    }

    #[test]
    fn sample_expectation_cases() {
        let p = worked_ising();
        let z = SpinConvention::parse_label("001").unwrap();
        let set = SampleSet::from_counts(3, [(z, 10)]);
        assert_eq!(expectation_from_samples(&p, &set).unwrap(), -7.0);
        let flat = SampleSet::from_counts(3, (0..8).map(|z| (z, 4)));
        assert!(expectation_from_samples(&p, &flat).unwrap().abs() < 1e-12);
        assert!(matches!(
            expectation_from_samples(&p, &SampleSet::new(3)),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn json_form() {
        let set = SampleSet::from_counts(3, [(4, 123), (0, 7)]);
        let s = set.to_json();
        assert_eq!(s, r#"{"shots":130,"counts":{"000":7,"001":123}}"#);
        assert_eq!(SampleSet::from_json(&s).unwrap(), set);
        assert!(SampleSet::from_json(r#"{"shots":5,"counts":{"01":4}}"#).is_err());
    }

    #[test]
    fn total_variation_shrinks_with_shots() {
        let p = worked_ising();
        let state = qaoa_state_fast(&p, &QaoaParams::new(vec![0.35], vec![2.6]).unwrap()).unwrap();
        let probs = state.probabilities();
        let tv = |shots: u64| -> f64 {
            (0..8)
                .map(|k| sample(&state, shots, 100 + k).unwrap().total_variation(&probs))
                .sum::<f64>()
                / 8.0
        };
        assert!(tv(1 << 14) < tv(1 << 8));
    }
}
