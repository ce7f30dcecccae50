use std::collections::BTreeMap;
use std::fs;

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qlslab::analysis::aggregate;
use qlslab::baselines::random_sampling_success;
use qlslab::problem::{BllsInstance, Encoding};
use qlslab::qaoa::{run_qaoa, trace_csv, QaoaProblem, RunRecord};
use qlslab::rng::{derive_seed, label_hash};

use super::{backend_mode, residual_shift, load_dataset, run_config};
use crate::args::{ExperimentArgs, Global, Mode};
use crate::output::{write_file, Output};

/// One unit of work in a sweep.
#[derive(Debug, Clone)]
struct Job {
    instance: usize,
    p: usize,
    mode: Mode,
    shots: Option<u64>,
    rep: usize,
    key: String,
    seed: u64,
}

/// Contents of `runs/<key>.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunFile {
    pub status: String,
    pub key: String,
    pub rep: usize,
    pub coupling: Option<String>,
    pub noise_scale: Option<f64>,
    pub n_ground_states: usize,
    pub record: Option<RunRecord>,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    n: usize,
    p: usize,
    mode: String,
    shots: Option<u64>,
    coupling: Option<String>,
    noise_scale: Option<f64>,
    runs: usize,
    failed: usize,
    median_rel_error: Option<f64>,
    mad_rel_error: Option<f64>,
    median_success_prob: Option<f64>,
    mad_success_prob: Option<f64>,
    median_ground_hits: Option<f64>,
    median_random_hit_prob: Option<f64>,
}

#[derive(Debug, Serialize)]
struct HitRow {
    instance_id: String,
    n: usize,
    p: usize,
    mode: String,
    shots: Option<u64>,
    rep: usize,
    final_shots: u64,
    ground_hits: u64,
    random_expected_hits: f64,
    random_hit_prob: f64,
}

fn default_shots(n: usize) -> Vec<u64> {
    (n.saturating_sub(2)..=n + 2).map(|i| 1u64 << i).collect()
}

pub fn run(global: &Global, args: &ExperimentArgs, out: &Output) -> Result<()> {
    if args.p.is_empty() || args.mode.is_empty() || args.reps == 0 {
        bail!("empty sweep");
    }
    let mut per_n: BTreeMap<usize, usize> = BTreeMap::new();
    let data: Vec<_> = load_dataset(&args.dataset)?
        .into_iter()
        .filter(|(row, _)| args.n_filter.is_empty() || args.n_filter.contains(&row.n))
        .filter(|(row, _)| {
            let seen = per_n.entry(row.n).or_insert(0);
            *seen += 1;
            args.limit.is_none_or(|l| *seen <= l)
        })
        .collect();
    if data.is_empty() {
        bail!("no instances selected");
    }

    let noisy_tag = format!("{}_ns{:?}", args.qaoa.coupling.name(), args.qaoa.noise_scale);
    let mut jobs = Vec::new();
    for (idx, (row, _)) in data.iter().enumerate() {
        for &p in &args.p {
            for &mode in &args.mode {
                let shot_list: Vec<Option<u64>> = match mode {
                    Mode::Exact => vec![None],
                    _ if args.shots.is_empty() => default_shots(row.n).into_iter().map(Some).collect(),
                    _ => args.shots.iter().copied().map(Some).collect(),
                };
                for shots in shot_list {
                    for rep in 0..args.reps {
                        let mut key = format!(
                            "{}_p{p}_{}_s{}_r{rep}",
                            row.instance_id,
                            mode.name(),
                            shots.unwrap_or(0)
                        );
                        let mut labels = vec![
                            label_hash(&row.instance_id),
                            p as u64,
                            label_hash(mode.name()),
                            shots.unwrap_or(0),
                            rep as u64,
                        ];
                        if mode == Mode::Noisy {
                            key = format!("{key}_{noisy_tag}");
                            labels.push(label_hash(&noisy_tag));
                        }
                        jobs.push(Job {
                            instance: idx,
                            p,
                            mode,
                            shots,
                            rep,
                            seed: derive_seed(global.seed, &labels),
                            key,
                        });
                    }
                }
            }
        }
    }

    let results: Vec<RunFile> = jobs
        .par_iter()
        .map(|job| {
            let path = out.path(format!("runs/{}.json", job.key));
            if let Ok(text) = fs::read_to_string(&path) {
                if let Ok(existing) = serde_json::from_str::<RunFile>(&text) {
                    if existing.status == "ok" {
                        log::info!("skipping {}", job.key);
                        return Ok(existing);
                    }
                }
            }
            let (row, inst) = &data[job.instance];
            let file = match execute(args, job, &row.instance_id, inst, out) {
                Ok(record) => RunFile {
                    status: "ok".into(),
                    key: job.key.clone(),
                    rep: job.rep,
                    coupling: (job.mode == Mode::Noisy).then(|| args.qaoa.coupling.name().to_string()),
                    noise_scale: (job.mode == Mode::Noisy).then_some(args.qaoa.noise_scale),
                    n_ground_states: row.n_ground_states,
                    record: Some(record),
                    error: None,
                },
                Err(e) => {
                    log::warn!("run {} failed: {e:#}", job.key);
                    RunFile {
                        status: "failed".into(),
                        key: job.key.clone(),
                        rep: job.rep,
                        coupling: None,
                        noise_scale: None,
                        n_ground_states: row.n_ground_states,
                        record: None,
                        error: Some(format!("{e:#}")),
                    }
                }
            };
            write_file(&path, &format!("{}\n", serde_json::to_string_pretty(&file)?))?;
            println!("{}", path.display());
            Ok(file)
        })
        .collect::<Result<_>>()?;

    let keyed: Vec<(&Job, &RunFile)> = jobs.iter().zip(&results).collect();
    out.write_csv("results.csv", summarize(&data, &keyed))?;
    out.write_csv("hits.csv", hit_rows(&data, &keyed)?)?;
    Ok(())
}

fn execute(
    args: &ExperimentArgs,
    job: &Job,
    id: &str,
    inst: &BllsInstance<f64>,
    out: &Output,
) -> Result<RunRecord> {
    let n = inst.cols();
    let encoding = Encoding::of(inst);
    let problem = QaoaProblem::new(encoding.ising.clone())?;
    let mode = backend_mode(job.mode, job.shots.unwrap_or(1), &args.qaoa, n);
    let cfg = run_config(job.p, mode, job.seed, &args.qaoa, residual_shift(&encoding));
    let run = run_qaoa(&problem, &cfg)?;
    let trace_rel = format!("traces/{}.csv", job.key);
    write_file(&out.path(&trace_rel), &trace_csv(&run.optimization.trace))?;
    println!("{}", out.path(&trace_rel).display());
    Ok(RunRecord::from_run(id, &cfg, &run, Some(trace_rel)))
}

fn summarize(
    data: &[(qlslab::datagen::ManifestRow, BllsInstance<f64>)],
    keyed: &[(&Job, &RunFile)],
) -> Vec<SummaryRow> {
    type GroupKey = (usize, usize, &'static str, Option<u64>);
    let mut groups: BTreeMap<GroupKey, Vec<&RunFile>> = BTreeMap::new();
    for (job, file) in keyed {
        let n = data[job.instance].0.n;
        groups
            .entry((n, job.p, job.mode.name(), job.shots))
            .or_default()
            .push(file);
    }
    let med_mad = |v: Vec<f64>| match aggregate(&v) {
        Ok((m, d)) => (Some(m), Some(d)),
        Err(_) => (None, None),
    };
    groups
        .into_iter()
        .map(|((n, p, mode, shots), files)| {
            let ok: Vec<&RunRecord> = files.iter().filter_map(|f| f.record.as_ref()).collect();
            let (median_rel_error, mad_rel_error) =
                med_mad(ok.iter().filter_map(|r| r.rel_error).collect());
            let (median_success_prob, mad_success_prob) =
                med_mad(ok.iter().map(|r| r.success_prob).collect());
            let (median_ground_hits, _) = med_mad(ok.iter().map(|r| r.ground_hits as f64).collect());
            let (median_random_hit_prob, _) = med_mad(
                files
                    .iter()
                    .filter_map(|f| {
                        let r = f.record.as_ref()?;
                        random_sampling_success(n, f.n_ground_states, r.final_shots).ok()
                    })
                    .collect(),
            );
            let first = files.iter().find(|f| f.record.is_some());
            SummaryRow {
                n,
                p,
                mode: mode.to_string(),
                shots,
                coupling: first.and_then(|f| f.coupling.clone()),
                noise_scale: first.and_then(|f| f.noise_scale),
                runs: files.len(),
                failed: files.len() - ok.len(),
                median_rel_error,
                mad_rel_error,
                median_success_prob,
                mad_success_prob,
                median_ground_hits,
                median_random_hit_prob,
            }
        })
        .collect()
}

fn hit_rows(
    data: &[(qlslab::datagen::ManifestRow, BllsInstance<f64>)],
    keyed: &[(&Job, &RunFile)],
) -> Result<Vec<HitRow>> {
    let mut rows = Vec::new();
    for (job, file) in keyed {
        let Some(r) = &file.record else { continue };
        let n = data[job.instance].0.n;
        let g = file.n_ground_states as f64;
        rows.push(HitRow {
            instance_id: r.instance_id.clone(),
            n,
            p: r.p,
            mode: r.mode.clone(),
            shots: r.shots,
            rep: file.rep,
            final_shots: r.final_shots,
            ground_hits: r.ground_hits,
            random_expected_hits: r.final_shots as f64 * g / 2f64.powi(n as i32),
            random_hit_prob: random_sampling_success(n, file.n_ground_states, r.final_shots)?,
        });
    }
    Ok(rows)
}
