//! Experiment orchestration: independent trials fanned out over threads,
//! pooled into [`AggregateMetrics`], and swept over one configuration axis.

mod aggregate;
mod config;
mod output;
mod trial;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use aggregate::{aggregate, AggregateMetrics};
pub use config::{parse_config, SimConfig, DEFAULT_LAMBDA_M};
pub use output::{format_sig6, write_csv, ResultRow, CSV_COLUMNS};
pub use trial::{
    draw_links, evaluate, run_trial, run_trial_on, sample_deployment, trial_rng, CountingRng, Deployment, TrialMetrics,
    UeRecord,
};

use crate::error::{Error, Result};

/// Runs `config.n_trials` trials and pools them. Trials without UEs or
/// without any base station are skipped.
pub fn simulate(config: &SimConfig) -> Result<AggregateMetrics> {
    config.validate()?;
    let results: Vec<Result<TrialMetrics>> =
        (0..config.n_trials as u64).into_par_iter().map(|i| run_trial(config, i)).collect();
    let mut trials = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(t) => trials.push(t),
            Err(Error::DegenerateTrial(_)) => {}
            Err(e) => return Err(e),
        }
    }
    aggregate(&trials, config.n_trials)
}

/// One-row result for a plain simulation, labelled with its `lambda_s`.
pub fn simulate_row(config: &SimConfig) -> Result<ResultRow> {
    Ok(ResultRow {
        axis_name: SweepAxis::LambdaS.to_string(),
        axis_value: config.lambda_s,
        env: config.environment.name.clone(),
        beta: config.environment.beta,
        metrics: simulate(config)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Total small-cell intensity, m⁻².
    LambdaS,
    /// Fraction of small cells on UHF.
    Gamma,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::LambdaS => "lambda_s",
            SweepAxis::Gamma => "gamma",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda_s" => Ok(SweepAxis::LambdaS),
            "gamma" => Ok(SweepAxis::Gamma),
            other => Err(Error::invalid(format!("unknown sweep axis `{other}`; expected lambda_s or gamma"))),
        }
    }
}

impl SweepAxis {
    fn check(self, index: usize, v: f64) -> Result<()> {
        let ok = match self {
            SweepAxis::LambdaS => v.is_finite() && v >= 0.0,
            SweepAxis::Gamma => (0.0..=1.0).contains(&v),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("{self} sweep value #{} ({v}) is out of range", index + 1)))
        }
    }

    fn apply(self, config: &mut SimConfig, v: f64) {
        match self {
            SweepAxis::LambdaS => config.lambda_s = v,
            SweepAxis::Gamma => config.gamma = v,
        }
    }

    /// Default grid: 8 log-spaced small-cell intensities from 2 to 100 times
    /// `lambda_m`, or gamma from 0 to 1 in steps of 0.1.
    pub fn default_values(self, config: &SimConfig) -> Vec<f64> {
        match self {
            SweepAxis::LambdaS => log_space(2.0 * config.lambda_m, 100.0 * config.lambda_m, 8),
            SweepAxis::Gamma => (0..=10).map(|i| i as f64 / 10.0).collect(),
        }
    }
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// One row per axis value, every row with the same master seed.
pub fn sweep(config: &SimConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<ResultRow>> {
    if values.is_empty() {
        return Err(Error::invalid("sweep needs at least one value"));
    }
    for (i, &v) in values.iter().enumerate() {
        axis.check(i, v)?;
    }
    values
        .iter()
        .map(|&v| {
            let mut cfg = config.clone();
            axis.apply(&mut cfg, v);
            Ok(ResultRow {
                axis_name: axis.to_string(),
                axis_value: v,
                env: cfg.environment.name.clone(),
                beta: cfg.environment.beta,
                metrics: simulate(&cfg)?,
            })
        })
        .collect()
}
