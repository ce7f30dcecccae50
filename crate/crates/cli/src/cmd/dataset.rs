use anyhow::Result;
use qlslab::datagen::{generate, DatasetSpec};

use super::{INSTANCE_DIR, MANIFEST};
use crate::args::{GenDatasetArgs, Global};
use crate::output::Output;

pub fn run(global: &Global, args: &GenDatasetArgs, out: &Output) -> Result<()> {
    let spec = DatasetSpec {
        n_values: args.n_values.clone(),
        m: args.m,
        density: args.density,
        problems_per_n: args.count,
        consistent_fraction: args.consistent_fraction,
        master_seed: global.seed,
        sparse_b: args.sparse_b,
    };
    let data = generate(&spec)?;
    for g in &data {
        out.write(
            format!("{INSTANCE_DIR}/{}.json", g.id),
            &format!("{}\n", g.instance.to_json()),
        )?;
    }
    out.write_csv(MANIFEST, data.iter().map(|g| g.manifest_row()))?;
    out.write("dataset_spec.json", &format!("{}\n", serde_json::to_string_pretty(&spec)?))?;
    Ok(())
}
