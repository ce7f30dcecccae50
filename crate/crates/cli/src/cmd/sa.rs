use anyhow::Result;
use serde::Serialize;

use qlslab::analysis::aggregate;
use qlslab::baselines::{sa_success_curve, SaConfig, SuiteProblem};
use qlslab::datagen::{generate, DatasetSpec};
use qlslab::problem::{brute_force_solve, BllsInstance, Encoding};

use super::load_dataset;
use crate::args::{Global, SaArgs};
use crate::output::Output;

#[derive(Serialize)]
struct MedianRow {
    n: usize,
    problems: usize,
    success: f64,
    mad: f64,
}

pub fn run(global: &Global, args: &SaArgs, out: &Output) -> Result<()> {
    let instances: Vec<(String, BllsInstance<f64>)> = match &args.dataset {
        Some(dir) => load_dataset(dir)?
            .into_iter()
            .map(|(row, inst)| (row.instance_id, inst))
            .collect(),
        None => {
            let spec = DatasetSpec {
                n_values: args.n_values.clone(),
                problems_per_n: args.count,
                master_seed: global.seed,
                ..DatasetSpec::default()
            };
            generate(&spec)?
                .into_iter()
                .map(|g| (g.id, g.instance))
                .collect()
        }
    };
    let prepared = instances
        .iter()
        .map(|(id, inst)| {
            let ising = Encoding::of(inst).ising;
            let ground = brute_force_solve(&ising)?;
            Ok((id.clone(), ising, ground))
        })
        .collect::<Result<Vec<_>>>()?;
    let suite: Vec<SuiteProblem<'_, f64>> = prepared
        .iter()
        .map(|(id, ising, ground)| SuiteProblem {
            id: id.clone(),
            ising,
            ground,
        })
        .collect();
    let cfg = SaConfig {
        t0: args.t0,
        tf: args.tf,
        k: args.k,
        sweeps_per_step: 1,
        seed: global.seed,
    };
    let (rows, medians) = sa_success_curve(&suite, args.runs, &cfg)?;
    let median_rows = medians
        .iter()
        .map(|&(n, success)| {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.success_fraction)
                .collect();
            let (_, mad) = aggregate(&vals)?;
            Ok(MedianRow {
                n,
                problems: vals.len(),
                success,
                mad,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.write_csv("sa_success.csv", &rows)?;
    out.write_csv("sa_median.csv", &median_rows)?;
    out.write("sa_config.json", &format!("{}\n", serde_json::to_string_pretty(&cfg)?))?;
    Ok(())
}
