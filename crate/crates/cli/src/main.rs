//! `qlslab`: dataset generation, QAOA sweeps, baselines and curve fits.

mod args;
mod cmd;
mod output;

use anyhow::Result;
use clap::Parser;

use args::{Cli, Command};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if cli.global.jobs > 0 {
        pool = pool.num_threads(cli.global.jobs);
    }
    let pool = pool.build()?;
    let out = output::Output::new(&cli.global.out)?;
    pool.install(|| match &cli.command {
        Command::GenDataset(a) => cmd::dataset::run(&cli.global, a, &out),
        Command::Solve(a) => cmd::solve::run(&cli.global, a, &out),
        Command::Experiment(a) => cmd::experiment::run(&cli.global, a, &out),
        Command::SaBaseline(a) => cmd::sa::run(&cli.global, a, &out),
        Command::FitCurves(a) => cmd::fit::run(a, &out),
        Command::TranspileReport(a) => cmd::transpile::run(&cli.global, a, &out),
        Command::Nbmf(a) => cmd::nbmf::run(&cli.global, a, &out),
    })
}
