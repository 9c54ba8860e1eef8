//! Cross-validated eigenvalue tests and the graph-dimension estimators built
//! on them.
//!
//! One fold works like this: the graph is thinned into a fitting half and a
//! test half, eigenvectors come from the fitting half (optionally after
//! degree normalization), and each eigenvector `x` is scored on the held-out
//! half by the quadratic form `x^T A_test x`. Under the null hypothesis that
//! `x` carries no remaining signal, that score divided by a plug-in standard
//! error is asymptotically standard normal, so components can be tested with
//! one-sided normal p-values. The dimension estimate is one less than the
//! first component whose p-value fails the significance level; component 1
//! is taken as signal without testing.
//!
//! Three estimators share that machinery:
//!
//! * [`eigcv`]: multi-fold testing for symmetric graphs, the default.
//! * [`eigcv_modified`]: a single-split variant with a delocalization gate
//!   and a deterministic `sqrt(n log n)` threshold instead of p-values.
//! * [`eigcv_rectangular`]: singular-vector version for rectangular or
//!   directed inputs, scoring `u^T A_test v`.
//!
//! All logarithms here are natural logarithms.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::SparseGraph;
use crate::model::ExpectedAdjacency;
use crate::split::split;
use crate::spectra::{top_eigen, top_svd};
use crate::stats::{bh_adjust, p_value};
use crate::{seed, Error, Result};

const EIG_STREAM: u64 = 0xE16;

/// Which matrix the fitting-half eigenvectors come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixMode {
    /// Degree-regularized normalization of the fitting graph.
    Laplacian,
    /// The fitting adjacency matrix itself.
    Adjacency,
}

/// Tuning knobs for [`eigcv`] and [`eigcv_rectangular`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigcvOptions {
    pub epsilon: f64,
    pub k_max: usize,
    pub folds: usize,
    pub alpha: f64,
    pub matrix_mode: MatrixMode,
    pub seed: u64,
    /// Apply a Benjamini-Hochberg adjustment to the component p-values
    /// before reading off the estimate.
    pub bh: bool,
    /// Rectangular mode only: use the variance-style denominator
    /// `sqrt(eps * (u^2)^T A (v^2))` instead of the default
    /// `sqrt(eps * (u^2)^T A v)`.
    pub squared_denominator: bool,
    /// Keep the per-fold eigenvectors on the report (not serialized).
    pub keep_vectors: bool,
    pub eig_tol: f64,
    pub eig_max_matvecs: usize,
}

impl Default for EigcvOptions {
    fn default() -> Self {
        EigcvOptions {
            epsilon: 0.05,
            k_max: 15,
            folds: 10,
            alpha: 0.05,
            matrix_mode: MatrixMode::Laplacian,
            seed: 0,
            bh: false,
            squared_denominator: false,
            keep_vectors: false,
            eig_tol: 1e-8,
            eig_max_matvecs: 500_000,
        }
    }
}

/// One component's score within one fold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvFoldStat {
    pub fold: usize,
    pub component: usize,
    pub lambda_test: f64,
    pub sigma: f64,
    pub t: f64,
    /// True when the standard error was numerically zero, leaving the
    /// statistic undefined; the component's p-value is then forced to 1.
    pub degenerate: bool,
    /// Outcome of the delocalization gate, recorded for every fold even when
    /// the estimator does not enforce it.
    pub deloc_pass: bool,
}

/// Per-component summary across folds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvComponent {
    pub component: usize,
    pub mean_t: f64,
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_adjusted: Option<f64>,
    pub folds: Vec<CvFoldStat>,
}

/// The estimate itself. `censored` marks a value that only says "at least
/// this large": every tested component was significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub k_hat: usize,
    pub censored: bool,
}

/// Parameters echoed into every report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvParameters {
    pub n_rows: usize,
    pub n_cols: usize,
    pub epsilon: f64,
    pub k_max: usize,
    pub folds: usize,
    pub alpha: f64,
    pub matrix_mode: MatrixMode,
    pub seed: u64,
    pub bh: bool,
    pub rectangular: bool,
}

/// Full output of a cross-validated estimation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvReport {
    pub parameters: CvParameters,
    pub components: Vec<CvComponent>,
    pub estimate: DimensionEstimate,
    pub warnings: Vec<String>,
    /// Fitting-half eigenvectors per fold, retained only when
    /// `keep_vectors` was set; never serialized.
    #[serde(skip)]
    pub vectors: Option<Vec<Vec<Vec<f64>>>>,
}

impl CvReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One row per component: index, mean statistic, p-value, and the
    /// adjusted p-value when a BH correction was applied.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("component,mean_t,p_value,p_adjusted\n");
        for c in &self.components {
            let adj = c
                .p_adjusted
                .map(|p| p.to_string())
                .unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", c.component, c.mean_t, c.p, adj));
        }
        out
    }
}

fn check_unit(x: &[f64]) -> Result<()> {
    let norm_sq: f64 = x.iter().map(|v| v * v).sum();
    if (norm_sq.sqrt() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "vector must have unit norm, got {}",
            norm_sq.sqrt()
        )));
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie strictly between 0 and 1, got {epsilon}"
        )));
    }
    Ok(())
}

/// Held-out score `x^T A_test x` of a unit vector.
pub fn lambda_test(test: &SparseGraph, x: &[f64]) -> Result<f64> {
    check_unit(x)?;
    if x.len() != test.n_rows() || !test.is_square() {
        return Err(Error::DimensionMismatch {
            context: "lambda_test needs a square test graph matching x".into(),
        });
    }
    Ok(test.quadratic_form(x, x))
}

/// Plug-in null standard error built from the full (unsplit) graph:
/// `sqrt(2 eps (x^2)^T A (x^2) - eps (x^2)^T diag(A) (x^2))`.
///
/// Returns 0 when `x` is supported entirely off the graph's edges; callers
/// treat that as a degenerate test.
pub fn sigma_full(x: &[f64], a: &SparseGraph, epsilon: f64) -> Result<f64> {
    check_unit(x)?;
    check_epsilon(epsilon)?;
    if x.len() != a.n_rows() || !a.is_square() {
        return Err(Error::DimensionMismatch {
            context: "sigma_full needs a square graph matching x".into(),
        });
    }
    let x2: Vec<f64> = x.iter().map(|v| v * v).collect();
    let q = a.quadratic_form(&x2, &x2);
    let diag = a.diagonal();
    let d4: f64 = x2.iter().zip(&diag).map(|(xi2, aii)| xi2 * xi2 * aii).sum();
    let var = epsilon * (2.0 * q - d4);
    Ok(var.max(0.0).sqrt())
}

/// Single-split standard error built from the fitting graph only:
/// `sqrt(eps/(1-eps) * (x^2)^T (2 A_fit - diag(A_fit)) (x^2))`.
pub fn sigma_split(x: &[f64], fit: &SparseGraph, epsilon: f64) -> Result<f64> {
    check_unit(x)?;
    check_epsilon(epsilon)?;
    if x.len() != fit.n_rows() || !fit.is_square() {
        return Err(Error::DimensionMismatch {
            context: "sigma_split needs a square graph matching x".into(),
        });
    }
    let x2: Vec<f64> = x.iter().map(|v| v * v).collect();
    let q = fit.quadratic_form(&x2, &x2);
    let diag = fit.diagonal();
    let d4: f64 = x2.iter().zip(&diag).map(|(xi2, aii)| xi2 * xi2 * aii).sum();
    let var = epsilon / (1.0 - epsilon) * (2.0 * q - d4);
    Ok(var.max(0.0).sqrt())
}

/// Population score `x^T P x` against a model's expected adjacency matrix.
pub fn lambda_pop(x: &[f64], p: &ExpectedAdjacency) -> Result<f64> {
    check_unit(x)?;
    if x.len() != p.n() {
        return Err(Error::DimensionMismatch {
            context: format!("vector of length {} against P of size {}", x.len(), p.n()),
        });
    }
    let xv = DVector::from_column_slice(x);
    Ok((p.matrix() * &xv).dot(&xv))
}

/// Diagonal weights minimizing the Frobenius reconstruction error
/// `||P - X diag(gamma) X^T||_F` over orthonormal columns `X`: the j-th
/// weight is simply `x_j^T P x_j`.
pub fn optimal_diag_reconstruction(
    p: &ExpectedAdjacency,
    xhat: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let n = p.n();
    let mut max_dev = 0.0f64;
    for (i, xi) in xhat.iter().enumerate() {
        if xi.len() != n {
            return Err(Error::DimensionMismatch {
                context: format!("column {i} has length {} against P of size {n}", xi.len()),
            });
        }
        for (j, xj) in xhat.iter().enumerate().take(i + 1) {
            let d: f64 = xi.iter().zip(xj).map(|(a, b)| a * b).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            max_dev = max_dev.max((d - target).abs());
        }
    }
    if max_dev > 1e-8 {
        return Err(Error::NotOrthonormal { deviation: max_dev });
    }
    xhat.iter()
        .map(|x| {
            let xv = DVector::from_column_slice(x);
            Ok((p.matrix() * &xv).dot(&xv))
        })
        .collect()
}

/// Localization diagnostic `(||x||_inf^2 / <pi, x^2>) / sqrt(m)`, where `pi`
/// is the degree distribution and `m` half the total degree. Values well
/// below 1 indicate a delocalized vector; values near or above 1 flag
/// localization (and unreliable normal approximations).
pub fn deloc_diagnostic(x: &[f64], degrees: &[f64]) -> Result<f64> {
    check_unit(x)?;
    if x.len() != degrees.len() {
        return Err(Error::DimensionMismatch {
            context: "diagnostic needs one degree per coordinate".into(),
        });
    }
    let total: f64 = degrees.iter().sum();
    if total <= 0.0 {
        return Err(Error::EmptyGraph {
            context: "delocalization diagnostic is undefined".into(),
        });
    }
    let inf_sq = x.iter().fold(0.0f64, |m, v| m.max(v * v));
    let weighted: f64 = x
        .iter()
        .zip(degrees)
        .map(|(xi, di)| di / total * xi * xi)
        .sum();
    if weighted <= 0.0 {
        return Err(Error::InvalidParameter(
            "vector is supported entirely on zero-degree nodes".into(),
        ));
    }
    let m = total / 2.0;
    Ok(inf_sq / weighted / m.sqrt())
}

/// Test-statistic threshold `sqrt(n log n)` of the single-split estimator.
pub fn modified_t_threshold(n: usize) -> f64 {
    let nf = n as f64;
    (nf * nf.ln()).sqrt()
}

/// Infinity-norm cap `log(n) / n` of the delocalization gate.
pub fn modified_inf_norm_cap(n: usize) -> f64 {
    let nf = n as f64;
    nf.ln() / nf
}

fn deloc_gate(x: &[f64], sigma_fit: f64, n: usize) -> bool {
    let inf_sq = x.iter().fold(0.0f64, |m, v| m.max(v * v));
    let log_n = (n as f64).ln();
    let cap = (sigma_fit * sigma_fit / (log_n * log_n)).min(modified_inf_norm_cap(n));
    inf_sq <= cap
}

/// A standard error at or below this floor marks a degenerate test: the
/// eigenvector sits off the graph's support up to solver noise, and the
/// ratio of two numerical zeros would be meaningless. The floor is far
/// below any standard error a vector genuinely touching the graph can
/// produce (a uniform vector already gives `sqrt(2 eps S) / n`).
fn sigma_floor(total_weight: f64, epsilon: f64) -> f64 {
    1e-12 * (epsilon * total_weight).sqrt()
}

/// Reads the estimate off an ascending p-value sequence for components
/// `2..=k_max`: the estimate is one less than the first component whose
/// p-value reaches `alpha`, and `k_max` (censored) if none does. Only the
/// significance pattern matters, not the p-values' magnitudes.
pub fn dimension_from_pvalues(ps: &[f64], alpha: f64) -> DimensionEstimate {
    for (i, &p) in ps.iter().enumerate() {
        if p >= alpha {
            return DimensionEstimate {
                k_hat: i + 1,
                censored: false,
            };
        }
    }
    DimensionEstimate {
        k_hat: ps.len() + 1,
        censored: true,
    }
}

struct FoldOutput {
    stats: Vec<CvFoldStat>,
    vectors: Option<Vec<Vec<f64>>>,
}

fn validate_common(opts: &EigcvOptions, k_limit: usize) -> Result<()> {
    check_epsilon(opts.epsilon)?;
    if !(opts.alpha > 0.0 && opts.alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie strictly between 0 and 1, got {}",
            opts.alpha
        )));
    }
    if opts.folds == 0 {
        return Err(Error::InvalidParameter(
            "at least one fold is required".into(),
        ));
    }
    if opts.k_max < 2 || opts.k_max > k_limit {
        return Err(Error::InvalidParameter(format!(
            "k_max must lie in 2..={k_limit}, got {}",
            opts.k_max
        )));
    }
    Ok(())
}

fn aggregate(
    parameters: CvParameters,
    fold_outputs: Vec<FoldOutput>,
    opts: &EigcvOptions,
) -> CvReport {
    let k_max = opts.k_max;
    let folds = opts.folds;
    let mut warnings = Vec::new();
    let mut components = Vec::with_capacity(k_max - 1);
    for comp in 2..=k_max {
        let mut stats = Vec::with_capacity(folds);
        let mut sum_t = 0.0;
        let mut degenerate = false;
        for out in &fold_outputs {
            let stat = out.stats[comp - 2].clone();
            if stat.degenerate {
                degenerate = true;
                warnings.push(format!(
                    "component {comp}: degenerate sigma in fold {}; p forced to 1",
                    stat.fold
                ));
            }
            sum_t += stat.t;
            stats.push(stat);
        }
        let mean_t = sum_t / folds as f64;
        let p = if degenerate { 1.0 } else { p_value(mean_t) };
        components.push(CvComponent {
            component: comp,
            mean_t,
            p,
            p_adjusted: None,
            folds: stats,
        });
    }

    let raw_ps: Vec<f64> = components.iter().map(|c| c.p).collect();
    let estimate = if opts.bh {
        let adjusted = bh_adjust(&raw_ps);
        for (c, &a) in components.iter_mut().zip(&adjusted) {
            c.p_adjusted = Some(a);
        }
        dimension_from_pvalues(&adjusted, opts.alpha)
    } else {
        dimension_from_pvalues(&raw_ps, opts.alpha)
    };

    let vectors = if opts.keep_vectors {
        Some(
            fold_outputs
                .into_iter()
                .map(|out| out.vectors.unwrap_or_default())
                .collect(),
        )
    } else {
        None
    };

    CvReport {
        parameters,
        components,
        estimate,
        warnings,
        vectors,
    }
}

/// Multi-fold cross-validated eigenvalue estimation of graph dimension for
/// symmetric graphs with nonnegative integer weights.
pub fn eigcv(a: &SparseGraph, opts: &EigcvOptions) -> Result<CvReport> {
    if !a.is_symmetric() {
        return Err(Error::InvalidParameter(
            "eigcv needs a symmetric graph; symmetrize it or use the rectangular variant"
                .into(),
        ));
    }
    let n = a.n_rows();
    validate_common(opts, n)?;
    a.integer_weights()?;

    let fold_outputs: Vec<FoldOutput> = (0..opts.folds)
        .into_par_iter()
        .map(|f| -> Result<FoldOutput> {
            let fold_seed = seed::mix(opts.seed, f as u64);
            let pair = split(a, opts.epsilon, fold_seed)?;
            let op = match opts.matrix_mode {
                MatrixMode::Laplacian => pair.fit.regularized_laplacian()?,
                MatrixMode::Adjacency => pair.fit.clone(),
            };
            let basis = top_eigen(
                &op,
                opts.k_max,
                opts.eig_tol,
                opts.eig_max_matvecs,
                seed::mix(fold_seed, EIG_STREAM),
            )?;
            let floor = sigma_floor(a.total_weight(), opts.epsilon);
            let mut stats = Vec::with_capacity(opts.k_max - 1);
            for comp in 2..=opts.k_max {
                let x = basis.vector(comp - 1);
                let lam = lambda_test(&pair.test, x)?;
                let sigma = sigma_full(x, a, opts.epsilon)?;
                let sigma_fit = sigma_split(x, &pair.fit, opts.epsilon)?;
                let degenerate = sigma <= floor;
                let t = if degenerate { 0.0 } else { lam / sigma };
                stats.push(CvFoldStat {
                    fold: f,
                    component: comp,
                    lambda_test: lam,
                    sigma,
                    t,
                    degenerate,
                    deloc_pass: deloc_gate(x, sigma_fit, n),
                });
            }
            let vectors = opts.keep_vectors.then(|| {
                (0..opts.k_max).map(|j| basis.vector(j).to_vec()).collect()
            });
            Ok(FoldOutput { stats, vectors })
        })
        .collect::<Result<Vec<_>>>()?;

    let parameters = CvParameters {
        n_rows: n,
        n_cols: n,
        epsilon: opts.epsilon,
        k_max: opts.k_max,
        folds: opts.folds,
        alpha: opts.alpha,
        matrix_mode: opts.matrix_mode,
        seed: opts.seed,
        bh: opts.bh,
        rectangular: false,
    };
    Ok(aggregate(parameters, fold_outputs, opts))
}

/// Singular-vector variant for rectangular or directed graphs.
///
/// Component scores are `u^T A_test v` over singular pairs of the fitting
/// half; no degree normalization is applied. The default denominator
/// `sqrt(eps * (u^2)^T A v)` follows the source formulation even though its
/// mixed power is suspect; it can go nonpositive, in which case the
/// component is reported as degenerate (p = 1) with a warning. The
/// `squared_denominator` option selects `sqrt(eps * (u^2)^T A (v^2))`, the
/// variance-style form, instead.
pub fn eigcv_rectangular(a: &SparseGraph, opts: &EigcvOptions) -> Result<CvReport> {
    let (r, c) = (a.n_rows(), a.n_cols());
    validate_common(opts, r.min(c))?;
    a.integer_weights()?;

    let dim = r.max(c);
    let fold_outputs: Vec<FoldOutput> = (0..opts.folds)
        .into_par_iter()
        .map(|f| -> Result<FoldOutput> {
            let fold_seed = seed::mix(opts.seed, f as u64);
            let pair = split(a, opts.epsilon, fold_seed)?;
            let basis = top_svd(
                &pair.fit,
                opts.k_max,
                opts.eig_tol,
                opts.eig_max_matvecs,
                seed::mix(fold_seed, EIG_STREAM),
            )?;
            let floor = sigma_floor(a.total_weight(), opts.epsilon);
            let mut stats = Vec::with_capacity(opts.k_max - 1);
            for comp in 2..=opts.k_max {
                let v = basis.vector(comp - 1);
                let u = basis.left_vector(comp - 1).expect("svd basis");
                let lam = pair.test.quadratic_form(u, v);
                let u2: Vec<f64> = u.iter().map(|z| z * z).collect();
                let var = if opts.squared_denominator {
                    let v2: Vec<f64> = v.iter().map(|z| z * z).collect();
                    opts.epsilon * a.quadratic_form(&u2, &v2)
                } else {
                    opts.epsilon * a.quadratic_form(&u2, v)
                };
                let sigma = if var > 0.0 { var.sqrt() } else { 0.0 };
                let degenerate = sigma <= floor;
                let t = if degenerate { 0.0 } else { lam / sigma };
                // Delocalization is checked on both singular vectors, with
                // the single-split variance form as the scale.
                let v2: Vec<f64> = v.iter().map(|z| z * z).collect();
                let var_fit = opts.epsilon / (1.0 - opts.epsilon)
                    * pair.fit.quadratic_form(&u2, &v2);
                let sigma_fit = var_fit.max(0.0).sqrt();
                let pass =
                    deloc_gate(u, sigma_fit, dim) && deloc_gate(v, sigma_fit, dim);
                stats.push(CvFoldStat {
                    fold: f,
                    component: comp,
                    lambda_test: lam,
                    sigma,
                    t,
                    degenerate,
                    deloc_pass: pass,
                });
            }
            let vectors = opts.keep_vectors.then(|| {
                (0..opts.k_max).map(|j| basis.vector(j).to_vec()).collect()
            });
            Ok(FoldOutput { stats, vectors })
        })
        .collect::<Result<Vec<_>>>()?;

    let parameters = CvParameters {
        n_rows: r,
        n_cols: c,
        epsilon: opts.epsilon,
        k_max: opts.k_max,
        folds: opts.folds,
        alpha: opts.alpha,
        matrix_mode: MatrixMode::Adjacency,
        seed: opts.seed,
        bh: opts.bh,
        rectangular: true,
    };
    Ok(aggregate(parameters, fold_outputs, opts))
}

/// Single-split estimator with a delocalization gate and a deterministic
/// threshold.
///
/// One split at rate `epsilon`; eigenvectors come from the fitting adjacency
/// matrix. A component enters the candidate set only if its eigenvector is
/// delocalized (`||x||_inf^2` at most both `sigma^2 / log^2 n` and
/// `log(n)/n`), and counts toward the estimate when its statistic reaches
/// `sqrt(n log n)`. All `k_max` leading components are screened, the leading
/// one included, so a graph whose every eigenvector is localized yields an
/// estimate of 0.
pub fn eigcv_modified(
    a: &SparseGraph,
    epsilon: f64,
    k_max: usize,
    seed_value: u64,
) -> Result<DimensionEstimate> {
    if !a.is_symmetric() {
        return Err(Error::InvalidParameter(
            "the single-split estimator needs a symmetric graph".into(),
        ));
    }
    let n = a.n_rows();
    check_epsilon(epsilon)?;
    if k_max < 2 || k_max > n {
        return Err(Error::InvalidParameter(format!(
            "k_max must lie in 2..={n}, got {k_max}"
        )));
    }
    a.integer_weights()?;

    let pair = split(a, epsilon, seed_value)?;
    let basis = top_eigen(
        &pair.fit,
        k_max,
        1e-8,
        500_000,
        seed::mix(seed_value, EIG_STREAM),
    )?;
    let threshold = modified_t_threshold(n);
    let floor = sigma_floor(pair.fit.total_weight(), epsilon);
    let mut count = 0usize;
    for comp in 1..=k_max {
        let x = basis.vector(comp - 1);
        let sigma = sigma_split(x, &pair.fit, epsilon)?;
        if sigma <= floor || !deloc_gate(x, sigma, n) {
            continue;
        }
        let t = lambda_test(&pair.test, x)? / sigma;
        if t >= threshold {
            count += 1;
        }
    }
    Ok(DimensionEstimate {
        k_hat: count,
        censored: count == k_max,
    })
}
