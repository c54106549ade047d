//! Composite experiments: exponent estimators, equality-in-law comparisons,
//! log-log fitting and result reporting.
//!
//! Every experiment is a deterministic function of its parameters and master
//! seed. Trials draw from derived substreams and are aggregated with integer
//! counters or order-preserving sums, so results do not depend on the number
//! of worker threads.

mod config;
mod exponents;
mod laws;
mod report;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rng::{RngStream, GENERATOR_ID};
use crate::stats::linear_fit;

pub use config::{run_experiment, run_experiment_config, ExperimentConfig, EXPERIMENT_IDS};
pub use exponents::{
    bm_disconnection_mc, bm_frontier_dimension, cluster_perimeter_scaling, cut_point_count, cut_point_scaling,
    disconnection_trial, saw_count_experiment, saw_diameter_scaling, srw_nonintersection_scaling, FrontierSet,
};
pub use laws::{
    cardy_crossing_experiment, cci_vs_bm, exploration_vs_sle, harmonic_identity_check, reflected_bm_cardy,
    sle_cardy_experiment, single_exploration, sle_vs_reflected_bm, triangle_endpoint_experiment, HarmonicIdentityConfig, LawSide,
};
pub use report::{write_csv, write_json, write_svg};

/// One `(scale, estimate, stderr)` row of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResultPoint {
    pub scale: f64,
    pub estimate: f64,
    pub stderr: f64,
}

impl ResultPoint {
    pub fn new(scale: f64, estimate: f64, stderr: f64) -> Self {
        Self {
            scale,
            estimate,
            stderr,
        }
    }
}

/// Fitted log-log slope as stored in a result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct FitSummary {
    pub slope: f64,
    pub slope_stderr: f64,
}

/// Serialized outcome of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExperimentResult {
    pub experiment_id: String,
    /// Every parameter the run used, defaults included.
    pub parameters: BTreeMap<String, Value>,
    pub master_seed: u64,
    pub generator: String,
    pub points: Vec<ResultPoint>,
    pub fit: Option<FitSummary>,
    /// Experiment-specific statistics (test statistics, exact counts, exit tallies).
    pub summary: BTreeMap<String, Value>,
    pub runtime_seconds: f64,
}

impl ExperimentResult {
    /// The value of a numeric summary entry.
    pub fn summary_f64(&self, key: &str) -> Option<f64> {
        self.summary.get(key).and_then(Value::as_f64)
    }

    /// JSON with the runtime zeroed, for reproducibility comparisons.
    pub fn canonical_json(&self) -> Result<String> {
        let mut copy = self.clone();
        copy.runtime_seconds = 0.0;
        Ok(serde_json::to_string_pretty(&copy)?)
    }
}

/// Weighted least-squares fit of `log y = intercept + slope · log x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct FitReport {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    /// Square root of the (weighted) residual sum of squares in log space.
    pub residual_norm: f64,
}

impl From<FitReport> for FitSummary {
    fn from(f: FitReport) -> Self {
        Self {
            slope: f.slope,
            slope_stderr: f.slope_stderr,
        }
    }
}

/// Fits a power law to `(x, y, yerr)` triples.
///
/// Weights are `(y/yerr)²`, the inverse variance of `log y` to first order.
/// If any `yerr` is zero (exact data) the fit is unweighted.
pub fn fit_exponent(points: &[(f64, f64, f64)]) -> Result<FitReport> {
    if points.len() < 3 {
        return Err(Error::param("points", format!("need at least 3, got {}", points.len())));
    }
    for &(x, y, e) in points {
        if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(Error::param("points", format!("nonpositive or non-finite value ({x}, {y})")));
        }
        if !(e >= 0.0 && e.is_finite()) {
            return Err(Error::param("points", format!("invalid error bar {e}")));
        }
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let weights: Option<Vec<f64>> = if points.iter().all(|p| p.2 > 0.0) {
        Some(points.iter().map(|p| (p.1 / p.2).powi(2)).collect())
    } else {
        None
    };
    let fit = linear_fit(&xs, &ys, weights.as_deref());
    let rss: f64 = (0..xs.len())
        .map(|i| {
            let w = weights.as_ref().map_or(1.0, |w| w[i]);
            w * (ys[i] - fit.intercept - fit.slope * xs[i]).powi(2)
        })
        .sum();
    Ok(FitReport {
        slope: fit.slope,
        intercept: fit.intercept,
        slope_stderr: fit.slope_stderr,
        residual_norm: rss.sqrt(),
    })
}

/// Fits the points of a result (all estimates must be positive).
pub fn fit_points(points: &[ResultPoint]) -> Result<FitReport> {
    let triples: Vec<(f64, f64, f64)> = points.iter().map(|p| (p.scale, p.estimate, p.stderr)).collect();
    fit_exponent(&triples)
}

/// Bookkeeping shared by the experiment drivers.
pub(crate) struct Run {
    id: &'static str,
    seed: u64,
    params: BTreeMap<String, Value>,
    summary: BTreeMap<String, Value>,
    start: Instant,
}

impl Run {
    pub(crate) fn new(id: &'static str, rng: RngStream) -> Self {
        Self {
            id,
            seed: rng.master_seed,
            params: BTreeMap::new(),
            summary: BTreeMap::new(),
            start: Instant::now(),
        }
    }

    pub(crate) fn param(&mut self, key: &str, value: impl Serialize) {
        self.params
            .insert(key.to_string(), serde_json::to_value(value).expect("parameter serializes"));
    }

    pub(crate) fn note(&mut self, key: &str, value: impl Serialize) {
        self.summary
            .insert(key.to_string(), serde_json::to_value(value).expect("summary serializes"));
    }

    pub(crate) fn finish(self, points: Vec<ResultPoint>, fit: Option<FitSummary>) -> Result<ExperimentResult> {
        if points.is_empty() {
            return Err(Error::param("points", "experiment produced no points"));
        }
        debug_assert!(points.iter().all(|p| p.stderr >= 0.0));
        Ok(ExperimentResult {
            experiment_id: self.id.to_string(),
            parameters: self.params,
            master_seed: self.seed,
            generator: GENERATOR_ID.to_string(),
            points,
            fit,
            summary: self.summary,
            runtime_seconds: self.start.elapsed().as_secs_f64(),
        })
    }
}

pub(crate) fn require_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    Ok(())
}
