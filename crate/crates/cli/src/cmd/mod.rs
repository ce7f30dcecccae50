pub mod dataset;
pub mod experiment;
pub mod fit;
pub mod nbmf;
pub mod sa;
pub mod solve;
pub mod transpile;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qlslab::circuit::CouplingMap;
use qlslab::datagen::ManifestRow;
use qlslab::problem::{BllsInstance, Encoding};
use qlslab::qaoa::{default_budget, default_starts, BackendMode, ErrorReference, RunConfig};
use qlslab::simulator::NoiseModel;

use crate::args::{Coupling, Mode, QaoaArgs, Reference};
use crate::output::read_csv;

pub const MANIFEST: &str = "manifest.csv";
pub const INSTANCE_DIR: &str = "instances";

pub fn load_instance(path: &Path) -> Result<BllsInstance<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    BllsInstance::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn instance_path(dataset: &Path, id: &str) -> PathBuf {
    dataset.join(INSTANCE_DIR).join(format!("{id}.json"))
}

/// Manifest rows of a dataset directory, with their instances.
pub fn load_dataset(dataset: &Path) -> Result<Vec<(ManifestRow, BllsInstance<f64>)>> {
    let rows: Vec<ManifestRow> = read_csv(&dataset.join(MANIFEST))?;
    if rows.is_empty() {
        bail!("dataset {} has an empty manifest", dataset.display());
    }
    rows.into_iter()
        .map(|row| {
            let inst = load_instance(&instance_path(dataset, &row.instance_id))?;
            Ok((row, inst))
        })
        .collect()
}

pub fn coupling_map(kind: Coupling, n: usize) -> CouplingMap {
    match kind {
        Coupling::All => CouplingMap::all_to_all(n),
        Coupling::Line => CouplingMap::line(n),
        Coupling::T => CouplingMap::t_shaped(n),
    }
}

pub fn backend_mode(mode: Mode, shots: u64, args: &QaoaArgs, n: usize) -> BackendMode {
    match mode {
        Mode::Exact => BackendMode::ExactStatevector,
        Mode::Shots => BackendMode::ShotSampling { shots },
        Mode::Noisy => BackendMode::Noisy {
            noise: NoiseModel::default().with_scale(args.noise_scale),
            shots,
            coupling: coupling_map(args.coupling, n),
        },
    }
}

pub fn run_config(
    p: usize,
    mode: BackendMode,
    seed: u64,
    args: &QaoaArgs,
    residual_shift: f64,
) -> RunConfig<f64> {
    let mut cfg = RunConfig::new(p, mode, seed);
    cfg.optimizer.budget = args.budget.unwrap_or_else(|| default_budget(p));
    cfg.n_starts = args.starts.unwrap_or_else(|| default_starts(p));
    if args.reference == Reference::Residual {
        cfg.reference = ErrorReference::Residual;
        cfg.residual_shift = residual_shift;
    }
    cfg
}

/// Added to Ising energies to turn them into squared residuals.
pub fn residual_shift(encoding: &Encoding<f64>) -> f64 {
    encoding.ising.offset + encoding.qubo.constant
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into())
}
