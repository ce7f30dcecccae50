//! Binary linear least squares as an Ising problem, solved with a simulated
//! QAOA loop and compared against classical baselines.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`). The aliases below
//! fix the scalar for the common cases.

pub mod analysis;
pub mod baselines;
pub mod circuit;
pub mod datagen;
pub mod error;
pub mod nbmf;
pub mod optimizer;
pub mod problem;
pub mod qaoa;
pub mod rng;
pub mod scalar;
pub mod simulator;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Blls = problem::BllsInstance<f64>;
pub type Blls32 = problem::BllsInstance<f32>;
pub type Qubo = problem::QuboProblem<f64>;
pub type Qubo32 = problem::QuboProblem<f32>;
pub type Ising = problem::IsingProblem<f64>;
pub type Ising32 = problem::IsingProblem<f32>;
pub type Circuit = circuit::Circuit<f64>;
pub type Circuit32 = circuit::Circuit<f32>;
pub type StateVector = simulator::StateVector<f64>;
pub type StateVector32 = simulator::StateVector<f32>;
pub type QaoaParams = qaoa::QaoaParams<f64>;
pub type QaoaParams32 = qaoa::QaoaParams<f32>;
