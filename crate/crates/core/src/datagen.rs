//! Seeded random BLLS datasets.
//!
//! Entries of `A` are nonzero with probability `density`; nonzero values are
//! drawn uniformly from `[-1, 1)` and rounded to three decimals. A fixed
//! fraction of instances per `n` is consistent (`b = A x*` for a random binary
//! `x*`); the rest get a dense `b` from the same value distribution and have
//! their optimum found by enumeration.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{
    blls_brute_force, brute_force_solve, BllsInstance, Encoding, InstanceKind, SpinConvention,
};
use crate::rng::{derive_seed, rng_from_seed, Rng};

/// Redraws allowed for a single all-zero row before the spec is declared infeasible.
pub const MAX_ROW_RETRIES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub n_values: Vec<usize>,
    pub m: usize,
    pub density: f64,
    pub problems_per_n: usize,
    pub consistent_fraction: f64,
    pub master_seed: u64,
    /// Draw `b` with the same sparsity as `A` instead of dense.
    #[serde(default)]
    pub sparse_b: bool,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self {
            n_values: vec![3, 4, 5, 9, 10],
            m: 40,
            density: 0.2,
            problems_per_n: 100,
            consistent_fraction: 0.4,
            master_seed: 0,
            sparse_b: false,
        }
    }
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidConfig(format!("density {} not in (0, 1]", self.density)));
        }
        if !(0.0..=1.0).contains(&self.consistent_fraction) {
            return Err(Error::InvalidConfig(format!(
                "consistent fraction {} not in [0, 1]",
                self.consistent_fraction
            )));
        }
        if self.m == 0 || self.n_values.is_empty() || self.n_values.contains(&0) {
            return Err(Error::InvalidConfig("m and every n must be positive".into()));
        }
        Ok(())
    }

    /// Number of consistent instances per `n`; they take the lowest indices.
    pub fn consistent_count(&self) -> usize {
        (self.consistent_fraction * self.problems_per_n as f64).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub id: String,
    pub n: usize,
    pub index: usize,
    pub instance: BllsInstance<f64>,
    pub ground_energy: f64,
    pub n_ground_states: usize,
}

/// One row of the dataset manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub instance_id: String,
    pub n: usize,
    pub kind: InstanceKind,
    pub ground_energy: f64,
    pub n_ground_states: usize,
}

impl GeneratedInstance {
    pub fn manifest_row(&self) -> ManifestRow {
        ManifestRow {
            instance_id: self.id.clone(),
            n: self.n,
            kind: self.instance.kind,
            ground_energy: self.ground_energy,
            n_ground_states: self.n_ground_states,
        }
    }
}

pub fn instance_id(n: usize, index: usize) -> String {
    format!("n{n:02}_{index:03}")
}

pub fn quantize(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Nonzero value: uniform on `[-1, 1)`, rounded. Values that round to zero
/// or up to 1 are redrawn.
fn draw_value(rng: &mut Rng) -> f64 {
    loop {
        let v = quantize(rng.gen_range(-1.0..1.0));
        if v != 0.0 && v < 1.0 {
            return v;
        }
    }
}

fn draw_entry(rng: &mut Rng, density: f64) -> f64 {
    if density >= 1.0 || rng.gen::<f64>() < density {
        draw_value(rng)
    } else {
        0.0
    }
}

fn draw_row(rng: &mut Rng, n: usize, density: f64) -> Result<Vec<f64>> {
    for _ in 0..MAX_ROW_RETRIES {
        let row: Vec<f64> = (0..n).map(|_| draw_entry(rng, density)).collect();
        if row.iter().any(|&v| v != 0.0) {
            return Ok(row);
        }
    }
    Err(Error::InfeasibleSpec(format!(
        "no nonzero row of width {n} at density {density} after {MAX_ROW_RETRIES} draws"
    )))
}

/// Generate one instance from its own seed.
pub fn generate_one(spec: &DatasetSpec, n: usize, index: usize) -> Result<GeneratedInstance> {
    let seed = derive_seed(spec.master_seed, &[n as u64, index as u64]);
    let mut rng = rng_from_seed(seed);
    let a: Vec<Vec<f64>> = (0..spec.m)
        .map(|_| draw_row(&mut rng, n, spec.density))
        .collect::<Result<_>>()?;
    let consistent = index < spec.consistent_count();
    let (b, kind, planted) = if consistent {
        let x: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=1u8)).collect();
        let b = a
            .iter()
            .map(|row| quantize(row.iter().zip(&x).map(|(&v, &xi)| v * f64::from(xi)).sum()))
            .collect();
        (b, InstanceKind::Consistent, Some(x))
    } else {
        let density = if spec.sparse_b { spec.density } else { 1.0 };
        let b = (0..spec.m).map(|_| draw_entry(&mut rng, density)).collect();
        (b, InstanceKind::Inconsistent, None)
    };
    let mut instance = BllsInstance::new(a, b, None, kind, seed)?;
    let (_, minimizers) = blls_brute_force(&instance)?;
    let x_star = match planted {
        Some(x) => x,
        None => SpinConvention::variables_of_index(minimizers[0], n),
    };
    instance.x_star = Some(x_star);
    let ground = brute_force_solve(&Encoding::of(&instance).ising)?;
    Ok(GeneratedInstance {
        id: instance_id(n, index),
        n,
        index,
        instance,
        ground_energy: ground.energy,
        n_ground_states: ground.count(),
    })
}

/// Generate the full dataset, ordered by `n` (as listed) then index.
pub fn generate(spec: &DatasetSpec) -> Result<Vec<GeneratedInstance>> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = spec
        .n_values
        .iter()
        .flat_map(|&n| (0..spec.problems_per_n).map(move |i| (n, i)))
        .collect();
    jobs.par_iter()
        .map(|&(n, i)| generate_one(spec, n, i))
        .collect()
}
