use anyhow::{bail, Result};
use serde::Serialize;

use qlslab::circuit::{
    build_qaoa_circuit, depth_and_counts, rewrite_basis, route, write_circuit, BuildOptions,
    CircuitReport,
};
use qlslab::problem::{BllsInstance, Encoding, InstanceKind};
use qlslab::qaoa::QaoaParams;

use super::{coupling_map, file_stem, load_instance};
use crate::args::{Global, TranspileArgs};
use crate::output::Output;

#[derive(Serialize)]
struct Report {
    instance: String,
    n: usize,
    p: usize,
    coupling: String,
    final_layout: Vec<usize>,
    logical: CircuitReport,
    routed: CircuitReport,
    basis: CircuitReport,
}

/// The 3-variable system with solution `x = (1, 1, 0)`.
fn builtin_example() -> BllsInstance<f64> {
    BllsInstance::new(
        vec![
            vec![2.0, 1.0, 1.0],
            vec![-1.0, 1.0, -1.0],
            vec![1.0, 2.0, 3.0],
        ],
        vec![3.0, 0.0, 3.0],
        Some(vec![1, 1, 0]),
        InstanceKind::Consistent,
        0,
    )
    .expect("valid built-in instance")
}

fn angles(given: &[f64], p: usize, default: f64, name: &str) -> Result<Vec<f64>> {
    match given.len() {
        0 => Ok(vec![default; p]),
        len if len == p => Ok(given.to_vec()),
        len => bail!("{len} {name} values for p = {p}"),
    }
}

pub fn run(_global: &Global, args: &TranspileArgs, out: &Output) -> Result<()> {
    let (name, inst) = match &args.instance {
        Some(path) => (file_stem(path), load_instance(path)?),
        None => ("example".to_string(), builtin_example()),
    };
    let n = inst.cols();
    let ising = Encoding::of(&inst).ising;
    let params = QaoaParams::new(
        angles(&args.gamma, args.p, 1.0, "gamma")?,
        angles(&args.beta, args.p, 0.5, "beta")?,
    )?;
    let logical = build_qaoa_circuit(&ising, &params, &BuildOptions::default())?;
    let routed = route(&logical, &coupling_map(args.coupling, n))?;
    let basis = rewrite_basis(&routed);
    let report = Report {
        instance: name.clone(),
        n,
        p: args.p,
        coupling: args.coupling.name().to_string(),
        final_layout: routed.layout().to_vec(),
        logical: depth_and_counts(&logical),
        routed: depth_and_counts(&routed),
        basis: depth_and_counts(&basis),
    };
    let json = serde_json::to_string_pretty(&report)?;
    let stem = format!("transpile/{name}_{}_p{}", args.coupling.name(), args.p);
    out.write(format!("{stem}.json"), &format!("{json}\n"))?;
    out.write(format!("{stem}_basis.qc"), &write_circuit(&basis))?;
    println!("{json}");
    Ok(())
}
