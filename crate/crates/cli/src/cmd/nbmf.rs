use anyhow::{anyhow, bail, Context, Result};

use qlslab::baselines::SaConfig;
use qlslab::nbmf::{frobenius_norm, nbmf_solve, planted_instance, BllsBackend, Matrix, NbmfProblem};
use qlslab::qaoa::BackendMode;

use super::run_config;
use crate::args::{Backend, Global, NbmfArgs};
use crate::output::Output;

fn read_matrix(path: &std::path::Path) -> Result<Matrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    rdr.records()
        .map(|rec| {
            rec?.iter()
                .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad number {s:?}")))
                .collect()
        })
        .collect()
}

fn matrix_csv<T: std::fmt::Display>(rows: &[Vec<T>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",") + "\n")
        .collect()
}

fn parse_shape(s: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<usize> = s
        .split('x')
        .map(|p| p.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| anyhow!("shape {s:?} is not MxNxR"))?;
    match parts[..] {
        [m, n, r] => Ok((m, n, r)),
        _ => bail!("shape {s:?} is not MxNxR"),
    }
}

pub fn run(global: &Global, args: &NbmfArgs, out: &Output) -> Result<()> {
    let (v, rank) = match (&args.input, &args.planted) {
        (Some(path), None) => {
            let rank = args.rank.ok_or_else(|| anyhow!("--rank is required with --input"))?;
            (read_matrix(path)?, rank)
        }
        (None, Some(shape)) => {
            let (m, n, r) = parse_shape(shape)?;
            let (v, _, _) = planted_instance(m, n, r, global.seed);
            out.write("nbmf/V.csv", &matrix_csv(&v))?;
            (v, args.rank.unwrap_or(r))
        }
        _ => bail!("give exactly one of --input and --planted"),
    };
    let backend = match args.backend {
        Backend::Brute => BllsBackend::BruteForce,
        Backend::Sa => BllsBackend::SimulatedAnnealing(SaConfig::default()),
        Backend::Qaoa => {
            // Column solutions come from the final samples; the error reference is unused.
            BllsBackend::Qaoa(run_config(args.p, BackendMode::ExactStatevector, 0, &args.qaoa, 0.0))
        }
    };
    let problem = NbmfProblem {
        max_outer_iters: args.max_iters,
        tolerance: args.tol,
        restart_on_stall: !args.no_restart,
        ..NbmfProblem::new(v.clone(), rank, global.seed)
    };
    let result = nbmf_solve(&problem, &backend)?;
    out.write("nbmf/W.csv", &matrix_csv(&result.w))?;
    out.write("nbmf/H.csv", &matrix_csv(&result.h))?;
    let norm = frobenius_norm(&v);
    let mut trace = String::from("iteration,best_residual,residual,relative_best\n");
    for (i, (best, raw)) in result.trace.iter().zip(&result.raw_trace).enumerate() {
        let rel = if norm > 0.0 { best / norm } else { 0.0 };
        trace.push_str(&format!("{i},{best},{raw},{rel}\n"));
    }
    out.write("nbmf/trace.csv", &trace)?;
    Ok(())
}
