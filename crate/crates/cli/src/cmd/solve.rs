use anyhow::Result;
use qlslab::problem::Encoding;
use qlslab::qaoa::{run_qaoa, trace_csv, QaoaProblem, RunRecord};

use super::{backend_mode, residual_shift, file_stem, load_instance, run_config};
use crate::args::{Global, SolveArgs};
use crate::output::Output;

pub fn run(global: &Global, args: &SolveArgs, out: &Output) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    let n = inst.cols();
    let encoding = Encoding::of(&inst);
    let problem = QaoaProblem::new(encoding.ising.clone())?;
    let shots = args.shots.unwrap_or(1 << n);
    let mode = backend_mode(args.mode, shots, &args.qaoa, n);
    let cfg = run_config(args.p, mode, global.seed, &args.qaoa, residual_shift(&encoding));
    let run = run_qaoa(&problem, &cfg)?;

    let id = file_stem(&args.instance);
    let stem = format!("solve/{id}_p{}_{}", args.p, args.mode.name());
    let trace_rel = format!("{stem}_trace.csv");
    out.write(&trace_rel, &trace_csv(&run.optimization.trace))?;
    let record = RunRecord::from_run(id, &cfg, &run, Some(trace_rel));
    out.write(format!("{stem}.json"), &format!("{}\n", serde_json::to_string_pretty(&record)?))?;
    out.write(format!("{stem}_samples.json"), &format!("{}\n", run.samples.to_json()))?;
    eprintln!(
        "n={n} p={} mode={} <C>={:.6} E_gs={:.6} rel_error={} success={:.6}",
        args.p,
        args.mode.name(),
        record.exact_expectation,
        record.ground_energy,
        record.rel_error.map_or("undefined".into(), |e| format!("{e:.6}")),
        record.success_prob
    );
    Ok(())
}
