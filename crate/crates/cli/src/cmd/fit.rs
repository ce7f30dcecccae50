use std::collections::HashMap;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use qlslab::analysis::{fit_power_law, fit_success_model, CurveFit};

use crate::args::{CurveKind, FitArgs};
use crate::output::Output;

#[derive(Serialize)]
struct Extrapolated {
    n: usize,
    value: f64,
    /// Per-query success, for the success model.
    per_query: Option<f64>,
}

#[derive(Serialize)]
struct Point {
    n: f64,
    value: f64,
}

#[derive(Serialize)]
struct FitReport {
    column: String,
    points: Vec<Point>,
    #[serde(flatten)]
    fit: CurveFit<f64>,
    extrapolated: Vec<Extrapolated>,
}

fn read_points(args: &FitArgs) -> Result<Vec<(f64, f64)>> {
    let filters: Vec<(String, String)> = args
        .filters
        .iter()
        .map(|f| {
            f.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| anyhow!("filter {f:?} is not COLUMN=VALUE"))
        })
        .collect::<Result<_>>()?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let headers: HashMap<String, usize> = rdr
        .headers()?
        .iter()
        .enumerate()
        .map(|(i, h)| (h.to_string(), i))
        .collect();
    let col = |name: &str| {
        headers
            .get(name)
            .copied()
            .ok_or_else(|| anyhow!("column {name:?} not found in {}", args.input.display()))
    };
    let (n_col, v_col) = (col("n")?, col(&args.column)?);
    let filter_cols: Vec<(usize, &str)> = filters
        .iter()
        .map(|(k, v)| Ok((col(k)?, v.as_str())))
        .collect::<Result<_>>()?;
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if filter_cols.iter().any(|&(i, v)| rec.get(i) != Some(v)) {
            continue;
        }
        let (Some(n), Some(v)) = (rec.get(n_col), rec.get(v_col)) else {
            continue;
        };
        if v.is_empty() {
            continue;
        }
        points.push((n.parse::<f64>()?, v.parse::<f64>()?));
    }
    if points.is_empty() {
        bail!("no data points selected");
    }
    Ok(points)
}

pub fn run(args: &FitArgs, out: &Output) -> Result<()> {
    let points = read_points(args)?;
    let fit = match args.model {
        CurveKind::PowerLaw => fit_power_law(&points, args.fixed_b)?,
        CurveKind::Success => fit_success_model(&points, args.k, args.fix_a)?,
    };
    let extrapolated = args
        .extrapolate
        .iter()
        .map(|&n| Extrapolated {
            n,
            value: fit.eval(n as f64),
            per_query: (args.model == CurveKind::Success).then(|| fit.per_query(n as f64)),
        })
        .collect();
    let report = FitReport {
        column: args.column.clone(),
        points: points.iter().map(|&(n, value)| Point { n, value }).collect(),
        fit,
        extrapolated,
    };
    out.write(&args.name, &format!("{}\n", serde_json::to_string_pretty(&report)?))?;
    Ok(())
}
