//! Simulation studies over grids of random-graph models: null calibration
//! of the component statistics and accuracy of the dimension estimate.
//!
//! A study is a grid of cells (model x target mean degree x edge law). Each
//! cell samples `replicates` independent graphs and runs the estimator on
//! every one. Calibration studies summarize the component statistics beyond
//! the model's true dimension (they should look standard normal when the
//! test is honest); accuracy studies summarize how often the estimate hits
//! the truth. Results flatten into long-format rows so they can be dumped
//! to CSV and plotted with anything.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cveig::{eigcv, DimensionEstimate, EigcvOptions, MatrixMode};
use crate::graph::SparseGraph;
use crate::model::{EdgeLaw, GraphModel, ModelSpec};
use crate::stats::normal_cdf;
use crate::{seed, Error, Result};

const SAMPLE_STREAM: u64 = 0x5A;
const ESTIMATE_STREAM: u64 = 0xE5;

/// A model with a display name for result rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedModel {
    pub name: String,
    pub model: ModelSpec,
}

/// Estimator settings shared by every cell of a study.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorSpec {
    pub epsilon: f64,
    pub k_max: usize,
    pub folds: usize,
    pub alpha: f64,
    pub matrix_mode: MatrixMode,
}

impl Default for EstimatorSpec {
    fn default() -> Self {
        let o = EigcvOptions::default();
        EstimatorSpec {
            epsilon: o.epsilon,
            k_max: o.k_max,
            folds: o.folds,
            alpha: o.alpha,
            matrix_mode: o.matrix_mode,
        }
    }
}

impl EstimatorSpec {
    pub fn options(&self, seed_value: u64) -> EigcvOptions {
        EigcvOptions {
            epsilon: self.epsilon,
            k_max: self.k_max,
            folds: self.folds,
            alpha: self.alpha,
            matrix_mode: self.matrix_mode,
            seed: seed_value,
            ..Default::default()
        }
    }
}

fn default_threshold() -> f64 {
    1.65
}

/// Declarative description of a whole study grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySpec {
    pub models: Vec<NamedModel>,
    /// Target mean degrees; empty keeps each model's own scale.
    #[serde(default)]
    pub degree_grid: Vec<f64>,
    /// Edge laws to sweep; empty keeps each model's own law.
    #[serde(default)]
    pub edge_laws: Vec<EdgeLaw>,
    #[serde(default)]
    pub estimator: EstimatorSpec,
    pub replicates: usize,
    /// Rejection threshold for calibration summaries.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub seed: u64,
}

impl StudySpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

/// One flattened statistic. `component` is empty for cell-level rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyRow {
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<f64>,
    pub edge_law: String,
    pub statistic: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
    pub value: f64,
}

/// Flattened study output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyResult {
    pub rows: Vec<StudyRow>,
    /// Wall-clock cost, filled in only when timings were requested so that
    /// the default output stays byte-identical across machines and runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_seconds_per_replicate: Option<f64>,
}

impl StudyResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,degree,edge_law,statistic,component,value\n");
        for r in &self.rows {
            let degree = r.degree.map(|d| d.to_string()).unwrap_or_default();
            let component = r.component.map(|c| c.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.model, degree, r.edge_law, r.statistic, component, r.value
            ));
        }
        out
    }
}

/// Normal-approximation rejection rate implied by an empirical mean and
/// standard deviation of a statistic: `1 - Phi((threshold - mean) / sd)`.
/// A perfectly calibrated standard-normal statistic gives the nominal level
/// of the threshold; a zero sd collapses to a point mass at the mean.
pub fn alpha_hat(mean: f64, sd: f64, threshold: f64) -> f64 {
    if sd <= 0.0 {
        return if mean >= threshold { 1.0 } else { 0.0 };
    }
    1.0 - normal_cdf((threshold - mean) / sd)
}

fn law_name(law: EdgeLaw) -> &'static str {
    match law {
        EdgeLaw::Poisson => "poisson",
        EdgeLaw::Bernoulli => "bernoulli",
    }
}

struct Cell {
    model_name: String,
    degree: Option<f64>,
    law: EdgeLaw,
    model: GraphModel,
    cell_seed: u64,
}

/// Expand the spec's grid into concrete per-cell models. Cell seeds are
/// derived from the grid position, so adding a cell never perturbs others.
fn expand_cells(spec: &StudySpec) -> Result<Vec<Cell>> {
    if spec.models.is_empty() {
        return Err(Error::InvalidParameter("study needs at least one model".into()));
    }
    if spec.replicates == 0 {
        return Err(Error::InvalidParameter(
            "study needs at least one replicate".into(),
        ));
    }
    let mut cells = Vec::new();
    let mut index = 0u64;
    for named in &spec.models {
        let degrees: Vec<Option<f64>> = if spec.degree_grid.is_empty() {
            vec![None]
        } else {
            spec.degree_grid.iter().copied().map(Some).collect()
        };
        let laws: Vec<Option<EdgeLaw>> = if spec.edge_laws.is_empty() {
            vec![None]
        } else {
            spec.edge_laws.iter().copied().map(Some).collect()
        };
        for &degree in &degrees {
            for &law in &laws {
                // Overrides go into the spec before the model is built, so
                // edge-law feasibility is judged at the degree the cell
                // actually samples at, not at the template's raw rates.
                let mut cell_spec = named.model.clone();
                if let Some(l) = law {
                    cell_spec.edge_law = l;
                }
                if let Some(d) = degree {
                    cell_spec.target_mean_degree = Some(d);
                }
                let model = cell_spec.build()?;
                cells.push(Cell {
                    model_name: named.name.clone(),
                    degree,
                    law: model.edge_law(),
                    model,
                    cell_seed: seed::mix(spec.seed, index),
                });
                index += 1;
            }
        }
    }
    Ok(cells)
}

fn run_replicates<T, F>(cell: &Cell, replicates: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&SparseGraph, u64) -> Result<T> + Sync,
{
    (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let rep_seed = seed::mix(cell.cell_seed, rep as u64);
            let graph = cell.model.sample(seed::mix(rep_seed, SAMPLE_STREAM))?;
            f(&graph, seed::mix(rep_seed, ESTIMATE_STREAM))
        })
        .collect()
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.max(0.0).sqrt())
}

/// Null-calibration study: summarize each tested component's statistic
/// across replicates — empirical mean, standard deviation, rejection rate
/// at the spec's threshold, and the [`alpha_hat`] implied by the first two.
pub fn calibration_study(spec: &StudySpec, timings: bool) -> Result<StudyResult> {
    if spec.replicates < 2 {
        return Err(Error::InvalidParameter(
            "calibration needs at least two replicates".into(),
        ));
    }
    let cells = expand_cells(spec)?;
    let mut rows = Vec::new();
    let mut total_seconds = 0.0;
    let mut total_reps = 0usize;
    for cell in &cells {
        let start = Instant::now();
        let per_rep: Vec<Vec<f64>> = run_replicates(cell, spec.replicates, |g, s| {
            let opts = spec.estimator.options(s);
            let report = eigcv(g, &opts)?;
            Ok(report.components.iter().map(|c| c.mean_t).collect())
        })?;
        total_seconds += start.elapsed().as_secs_f64();
        total_reps += spec.replicates;

        for (ci, comp) in (2..=spec.estimator.k_max).enumerate() {
            let ts: Vec<f64> = per_rep.iter().map(|r| r[ci]).collect();
            let (mean, sd) = mean_sd(&ts);
            let reject = ts.iter().filter(|&&t| t >= spec.threshold).count() as f64
                / ts.len() as f64;
            for (stat, value) in [
                ("mean_t", mean),
                ("sd_t", sd),
                ("rejection", reject),
                ("alpha_hat", alpha_hat(mean, sd, spec.threshold)),
            ] {
                rows.push(StudyRow {
                    model: cell.model_name.clone(),
                    degree: cell.degree,
                    edge_law: law_name(cell.law).to_string(),
                    statistic: stat.to_string(),
                    component: Some(comp),
                    value,
                });
            }
        }
    }
    Ok(StudyResult {
        rows,
        mean_seconds_per_replicate: timings.then(|| total_seconds / total_reps as f64),
    })
}

/// Accuracy study against each cell's true dimension (the model's block
/// count). Reports the exact-hit rate, the mean estimate, the censored-run
/// rate, and the mean and standard deviation of the relative error
/// `(k_hat - k) / k`.
pub fn accuracy_study(spec: &StudySpec, timings: bool) -> Result<StudyResult> {
    accuracy_study_with(spec, timings, |g, opts| Ok(eigcv(g, opts)?.estimate))
}

/// Accuracy study with a caller-supplied estimator, so the harness itself
/// can be exercised against stubs with known behavior.
pub fn accuracy_study_with<F>(spec: &StudySpec, timings: bool, estimator: F) -> Result<StudyResult>
where
    F: Fn(&SparseGraph, &EigcvOptions) -> Result<DimensionEstimate> + Sync,
{
    let cells = expand_cells(spec)?;
    let mut rows = Vec::new();
    let mut total_seconds = 0.0;
    let mut total_reps = 0usize;
    for cell in &cells {
        let truth = cell.model.k();
        let start = Instant::now();
        let estimates: Vec<DimensionEstimate> =
            run_replicates(cell, spec.replicates, |g, s| {
                estimator(g, &spec.estimator.options(s))
            })?;
        total_seconds += start.elapsed().as_secs_f64();
        total_reps += spec.replicates;

        let n = estimates.len() as f64;
        let hits = estimates.iter().filter(|e| e.k_hat == truth).count() as f64 / n;
        let mean_k = estimates.iter().map(|e| e.k_hat as f64).sum::<f64>() / n;
        let censored = estimates.iter().filter(|e| e.censored).count() as f64 / n;
        let rel: Vec<f64> = estimates
            .iter()
            .map(|e| (e.k_hat as f64 - truth as f64) / truth as f64)
            .collect();
        let (rel_mean, rel_sd) = mean_sd(&rel);
        for (stat, value) in [
            ("accuracy", hits),
            ("mean_k_hat", mean_k),
            ("censored_rate", censored),
            ("rel_err_mean", rel_mean),
            ("rel_err_sd", rel_sd),
        ] {
            rows.push(StudyRow {
                model: cell.model_name.clone(),
                degree: cell.degree,
                edge_law: law_name(cell.law).to_string(),
                statistic: stat.to_string(),
                component: None,
                value,
            });
        }
    }
    Ok(StudyResult {
        rows,
        mean_seconds_per_replicate: timings.then(|| total_seconds / total_reps as f64),
    })
}
