//! Exact search against simulated annealing on generated instances.

use std::path::{Path, PathBuf};
use std::time::Instant;

use greenroute_core::exact::{solve_exact, ExactStatus};
use greenroute_core::instgen::{generate, GenSpec};
use greenroute_core::sa::{anneal, SaConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::deadline::Deadline;
use crate::io::{best_by_epoch, write_instance};
use crate::plot::convergence_svg;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub instance: String,
    pub n: usize,
    pub exact_objective: Option<f64>,
    pub exact_time_s: f64,
    pub exact_proven: bool,
    pub sa_objective: Option<f64>,
    pub sa_time_s: f64,
    pub gap_pct: Option<f64>,
    pub time_decrease_pct: Option<f64>,
    /// `ok`, or what went wrong for this instance.
    pub status: String,
}

#[derive(Debug, Clone)]
pub struct CompareConfig {
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub exact_budget_s: f64,
    pub out_dir: PathBuf,
    pub jobs: usize,
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub rows: Vec<CompareRow>,
    pub csv: PathBuf,
    pub plots: Vec<PathBuf>,
}

fn run_one(id: String, n: usize, seed: u64, budget: f64, dir: &Path) -> (CompareRow, Option<PathBuf>) {
    let mut row = CompareRow {
        instance: id.clone(),
        n,
        exact_objective: None,
        exact_time_s: 0.0,
        exact_proven: false,
        sa_objective: None,
        sa_time_s: 0.0,
        gap_pct: None,
        time_decrease_pct: None,
        status: "ok".into(),
    };
    let inst = match generate(&GenSpec::new(n, seed)) {
        Ok(inst) => inst,
        Err(e) => {
            row.status = format!("generation failed: {e}");
            return (row, None);
        }
    };
    let mut problems = Vec::new();
    if let Err(e) = std::fs::write(dir.join(format!("{id}.txt")), write_instance(&inst)) {
        problems.push(format!("instance not written: {e}"));
    }

    let start = Instant::now();
    let exact = solve_exact(&inst, 0.0, &mut Deadline::seconds(budget));
    row.exact_time_s = start.elapsed().as_secs_f64();
    row.exact_proven = exact.proven;
    row.exact_objective = exact.optimum.map(|o| o.total);
    match exact.status {
        ExactStatus::Infeasible => problems.push("exact: infeasible".into()),
        ExactStatus::Unknown => problems.push("exact: no incumbent within budget".into()),
        ExactStatus::Optimal | ExactStatus::Incumbent => {}
    }

    let start = Instant::now();
    let sa = anneal(&inst, &SaConfig::with_seed(seed));
    row.sa_time_s = start.elapsed().as_secs_f64();
    let mut plot = None;
    match sa {
        Ok(sa) => {
            row.sa_objective = Some(sa.objective.total);
            let path = dir.join(format!("{id}.svg"));
            match convergence_svg(&path, &best_by_epoch(&sa.trace)) {
                Ok(()) => plot = Some(path),
                Err(e) => problems.push(format!("plot failed: {e}")),
            }
        }
        Err(e) => problems.push(format!("sa: {e}")),
    }

    if let (Some(e), Some(s)) = (row.exact_objective, row.sa_objective) {
        row.gap_pct = Some(100.0 * (s - e) / e);
    }
    if row.exact_time_s > 0.0 {
        row.time_decrease_pct = Some(100.0 * (row.exact_time_s - row.sa_time_s) / row.exact_time_s);
    }
    if !problems.is_empty() {
        row.status = problems.join("; ");
    }
    (row, plot)
}

/// Runs every (size, trial) pair, writes `compare.csv` and one plot per
/// instance into `out_dir`. Per-instance failures are recorded in the row.
pub fn run_compare(cfg: &CompareConfig) -> anyhow::Result<CompareOutcome> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let jobs: Vec<(String, usize, u64)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .enumerate()
        .map(|(idx, (n, t))| (format!("n{n}_t{t}"), n, cfg.seed.wrapping_add(idx as u64)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs.max(1)).build()?;
    let results: Vec<(CompareRow, Option<PathBuf>)> = pool.install(|| {
        jobs.into_par_iter().map(|(id, n, seed)| run_one(id, n, seed, cfg.exact_budget_s, &cfg.out_dir)).collect()
    });
    let csv_path = cfg.out_dir.join("compare.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    for (row, _) in &results {
        w.serialize(row)?;
    }
    w.flush()?;
    let (rows, plots): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok(CompareOutcome { rows, csv: csv_path, plots: plots.into_iter().flatten().collect() })
}
