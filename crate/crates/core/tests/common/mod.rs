#![allow(dead_code)]

pub mod oracle;

use qlslab::problem::{Couplings, IsingProblem};
use qlslab::qaoa::QaoaParams;
use rand::Rng;

pub fn random_ising(rng: &mut impl Rng, n: usize) -> IsingProblem<f64> {
    let h = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let mut j = Couplings::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(0.7) {
                j.insert((a, b), rng.gen_range(-2.0..2.0));
            }
        }
    }
    IsingProblem::new(h, j, rng.gen_range(-3.0..3.0)).unwrap()
}

pub fn random_params(rng: &mut impl Rng, p: usize) -> QaoaParams<f64> {
    let tau = std::f64::consts::TAU;
    QaoaParams::new(
        (0..p).map(|_| rng.gen_range(0.0..tau)).collect(),
        (0..p).map(|_| rng.gen_range(0.0..std::f64::consts::PI)).collect(),
    )
    .unwrap()
}
