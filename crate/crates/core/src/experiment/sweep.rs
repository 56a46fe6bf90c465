use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_trial_at, ExperimentConfig, TrialRecord, TrialStatus};
use crate::error::{invalid, Result};

pub const METRIC_HIT_RATE: &str = "hit_rate";
pub const METRIC_CACHED_HIT_RATE: &str = "cached_hit_rate";
pub const METRIC_MSE: &str = "mse";
pub const METRIC_TRIAL_FAILED: &str = "trial_failed";

/// All trials at one λ_R, in trial order. Trials run in parallel; each owns
/// its random streams, so the result does not depend on scheduling.
pub fn run_trials(config: &ExperimentConfig, lambda_r: f64) -> Vec<TrialRecord> {
    (0..config.trials).into_par_iter().map(|t| run_trial_at(config, lambda_r, t)).collect()
}

/// One tidy observation: `name` is a strategy or an estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda_r: f64,
    pub name: String,
    pub trial: usize,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub lambda_r: f64,
    pub name: String,
    pub metric: String,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SummaryRow>,
    pub records: Vec<TrialRecord>,
}

pub fn record_rows(record: &TrialRecord, p_c: f64) -> Vec<SweepRow> {
    let row = |name: &str, metric: &str, value: f64| SweepRow {
        lambda_r: record.lambda_r,
        name: name.to_string(),
        trial: record.trial,
        metric: metric.to_string(),
        value,
    };
    if let TrialStatus::Failed(_) = record.status {
        return vec![row("trial", METRIC_TRIAL_FAILED, 1.0)];
    }
    let mut rows = Vec::new();
    for p in &record.placements {
        rows.push(row(p.strategy.name(), METRIC_HIT_RATE, p.value));
        rows.push(row(p.strategy.name(), METRIC_CACHED_HIT_RATE, p.value * p_c));
    }
    for (e, mse) in &record.mse {
        rows.push(row(e.name(), METRIC_MSE, *mse));
    }
    rows
}

fn summarize(rows: &[SweepRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(f64, String, String)> = Vec::new();
    for r in rows.iter().filter(|r| r.metric != METRIC_TRIAL_FAILED) {
        let key = (r.lambda_r, r.name.clone(), r.metric.clone());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(lambda_r, name, metric)| {
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| r.lambda_r == lambda_r && r.name == name && r.metric == metric)
                .map(|r| r.value)
                .collect();
            let n = values.len();
            let mean = values.iter().sum::<f64>() / n as f64;
            let var = if n > 1 {
                values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
            } else {
                0.0
            };
            SummaryRow {
                lambda_r,
                name,
                metric,
                n,
                mean,
                std: var.sqrt(),
                min: values.iter().copied().fold(f64::INFINITY, f64::min),
                max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}

impl SweepReport {
    pub fn from_records(records: Vec<TrialRecord>, p_c: f64) -> Self {
        let rows: Vec<SweepRow> = records.iter().flat_map(|r| record_rows(r, p_c)).collect();
        let summary = summarize(&rows);
        Self { rows, summary, records }
    }

    /// Ensemble mean of `metric` for `name` at `lambda_r`.
    pub fn mean(&self, lambda_r: f64, name: &str, metric: &str) -> Option<f64> {
        self.summary
            .iter()
            .find(|s| s.lambda_r == lambda_r && s.name == name && s.metric == metric)
            .map(|s| s.mean)
    }

    pub fn failed_trials(&self) -> usize {
        self.records.iter().filter(|r| !r.is_ok()).count()
    }
}

/// Trials at every swept λ_R.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepReport> {
    if config.sweep.is_empty() {
        return Err(invalid("sweep list is empty"));
    }
    let records = config.sweep.iter().flat_map(|&l| run_trials(config, l)).collect();
    Ok(SweepReport::from_records(records, config.channel.p_c))
}
