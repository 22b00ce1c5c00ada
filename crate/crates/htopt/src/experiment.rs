//! Seeded runs over a grid of budgets and their summaries.

use htopt_core::analysis::{quantile_report, rate_fit, QuantileReport, RateFit, DEFAULT_LEVELS};
use htopt_core::optimizers::{RunTrace, Schedule};
use htopt_core::rng::RngStream;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::HarnessError;

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    pub t: usize,
    pub trace: RunTrace,
}

/// Per-budget summary over seeds. `error` is the seed mean of
/// `(1/T) sum_{t<T} ||grad F(x_t)||`.
#[derive(Clone, Debug, Serialize)]
pub struct BudgetSummary {
    pub t: usize,
    pub error: f64,
    pub mean_final_grad_norm: f64,
    pub quantiles: QuantileReport,
    pub mean_samples: f64,
    pub schedule: Schedule,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub algorithm: String,
    pub n_seeds: u64,
    pub base_seed: u64,
    pub budgets: Vec<BudgetSummary>,
    /// Present when the grid has at least four budgets.
    pub fit: Option<RateFit>,
}

/// Runs every `(T, seed)` pair with seeds `base_seed, base_seed + 1, ...`.
/// Records come back sorted by `(T, seed)` regardless of thread scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>, HarnessError> {
    let alg = cfg.algorithm()?;
    let (problem, x0) = cfg.problem()?;
    let mut jobs = Vec::new();
    for &t in &cfg.t_grid {
        let sched = cfg.schedule_for(&problem, &x0, t)?;
        for k in 0..cfg.n_seeds {
            jobs.push((t, cfg.base_seed.wrapping_add(k), sched.clone()));
        }
    }
    let mut records = jobs
        .into_par_iter()
        .map(|(t, seed, sched)| {
            let mut p = problem.clone();
            let mut rng = RngStream::new(seed);
            let trace = alg.run(p.oracle(), &x0, &sched, &mut rng)?;
            Ok(RunRecord { seed, t, trace })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    records.sort_by_key(|r| (r.t, r.seed));
    Ok(records)
}

pub fn summarize(cfg: &ExperimentConfig, records: &[RunRecord]) -> Result<SweepReport, HarnessError> {
    let (problem, x0) = cfg.problem()?;
    let mut budgets = Vec::with_capacity(cfg.t_grid.len());
    for &t in &cfg.t_grid {
        let runs: Vec<&RunRecord> = records.iter().filter(|r| r.t == t).collect();
        if runs.is_empty() {
            continue;
        }
        let n = runs.len() as f64;
        let avg: Vec<f64> = runs.iter().map(|r| r.trace.average_grad_norm()).collect();
        budgets.push(BudgetSummary {
            t,
            error: avg.iter().sum::<f64>() / n,
            mean_final_grad_norm: runs.iter().map(|r| r.trace.final_grad_norm()).sum::<f64>() / n,
            quantiles: quantile_report(&avg, &DEFAULT_LEVELS)?,
            mean_samples: runs.iter().map(|r| r.trace.total_samples() as f64).sum::<f64>() / n,
            schedule: cfg.schedule_for(&problem, &x0, t)?,
        });
    }
    let fit = if budgets.len() >= 4 {
        let ts: Vec<f64> = budgets.iter().map(|b| b.t as f64).collect();
        let es: Vec<f64> = budgets.iter().map(|b| b.error).collect();
        Some(rate_fit(&ts, &es)?)
    } else {
        None
    };
    Ok(SweepReport {
        algorithm: cfg.algorithm.clone(),
        n_seeds: cfg.n_seeds,
        base_seed: cfg.base_seed,
        budgets,
        fit,
    })
}

/// [`run_experiment`] followed by [`summarize`].
pub fn sweep(cfg: &ExperimentConfig) -> Result<(Vec<RunRecord>, SweepReport), HarnessError> {
    let records = run_experiment(cfg)?;
    let report = summarize(cfg, &records)?;
    Ok((records, report))
}
