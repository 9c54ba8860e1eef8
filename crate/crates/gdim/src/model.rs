//! Degree-corrected block models and samplers for them.
//!
//! A model is a block matrix `B`, a block assignment `z`, node propensities
//! `theta`, and an edge law. Entry `(i, j)` of the expected adjacency matrix
//! is `theta_i * theta_j * B[z_i][z_j]`, diagonal included, so sampled graphs
//! may carry self-loops. Poisson sampling produces multigraphs; Bernoulli
//! sampling produces simple graphs and requires every expected entry to be a
//! valid probability.
//!
//! Sampling draws each row from its own seeded generator, which makes a draw
//! reproducible for a fixed seed no matter how rows are scheduled across
//! threads.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::SparseGraph;
use crate::{seed, Error, Result};

/// Guard for materializing the dense expected adjacency matrix.
pub const EXPECTED_ADJACENCY_LIMIT: usize = 10_000;

const BLOCK_STREAM: u64 = 0xB10C;
const THETA_STREAM: u64 = 0x7E7A;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeLaw {
    Poisson,
    Bernoulli,
}

/// Distribution of the degree propensities, as written in a model spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum ThetaSpec {
    PointMass {
        #[serde(default = "default_point_mass")]
        value: f64,
    },
    Exponential {
        rate: f64,
    },
    Pareto {
        location: f64,
        dispersion: f64,
    },
    Explicit {
        values: Vec<f64>,
    },
}

fn default_point_mass() -> f64 {
    1.0
}

impl ThetaSpec {
    /// Draws (or copies) a propensity vector of length `n`.
    pub fn draw(&self, n: usize, seed_value: u64) -> Result<Vec<f64>> {
        let mut rng = seed::rng(seed_value);
        match self {
            ThetaSpec::PointMass { value } => {
                if !(*value > 0.0) {
                    return Err(Error::InvalidParameter(
                        "point-mass theta must be positive".into(),
                    ));
                }
                Ok(vec![*value; n])
            }
            ThetaSpec::Exponential { rate } => {
                let dist = rand_distr::Exp::new(*rate).map_err(|_| {
                    Error::InvalidParameter("exponential rate must be positive".into())
                })?;
                Ok((0..n).map(|_| dist.sample(&mut rng)).collect())
            }
            ThetaSpec::Pareto {
                location,
                dispersion,
            } => {
                let dist = rand_distr::Pareto::new(*location, *dispersion).map_err(|_| {
                    Error::InvalidParameter(
                        "Pareto location and dispersion must be positive".into(),
                    )
                })?;
                Ok((0..n).map(|_| dist.sample(&mut rng)).collect())
            }
            ThetaSpec::Explicit { values } => {
                if values.len() != n {
                    return Err(Error::DimensionMismatch {
                        context: format!(
                            "explicit theta has {} entries for n = {}",
                            values.len(),
                            n
                        ),
                    });
                }
                Ok(values.clone())
            }
        }
    }
}

/// A degree-corrected block model ready to sample from.
#[derive(Debug, Clone)]
pub struct GraphModel {
    n: usize,
    k: usize,
    b: DMatrix<f64>,
    blocks: Vec<usize>,
    theta: Vec<f64>,
    edge_law: EdgeLaw,
}

/// Dense expected adjacency matrix of a model; rank is at most the number of
/// blocks.
#[derive(Debug, Clone)]
pub struct ExpectedAdjacency {
    matrix: DMatrix<f64>,
    rank_bound: usize,
}

impl ExpectedAdjacency {
    /// Wraps an explicitly constructed population matrix, for callers that
    /// compute `P` some other way. The rank bound is the trivial one.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "population matrix must be square, got {} x {}",
                    matrix.nrows(),
                    matrix.ncols()
                ),
            });
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "population matrix has non-finite entries".into(),
            ));
        }
        let rank_bound = matrix.nrows();
        Ok(ExpectedAdjacency { matrix, rank_bound })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rank_bound(&self) -> usize {
        self.rank_bound
    }

    /// Degree-normalized form of the expected adjacency matrix, mirroring
    /// [`SparseGraph::regularized_laplacian`](crate::graph::SparseGraph::regularized_laplacian):
    /// `L = D P D` with `D_ii = (d_i + tau)^(-1/2)`, where `d_i` are the row
    /// sums of `P` and `tau` is their mean.
    pub fn regularized_laplacian(&self) -> Result<DMatrix<f64>> {
        let n = self.n();
        let d: Vec<f64> = (0..n).map(|i| self.matrix.row(i).sum()).collect();
        let tau = d.iter().sum::<f64>() / n.max(1) as f64;
        if tau <= 0.0 {
            return Err(Error::EmptyGraph {
                context: "regularized Laplacian is undefined".into(),
            });
        }
        let scale: Vec<f64> = d.iter().map(|&di| 1.0 / (di + tau).sqrt()).collect();
        let mut out = self.matrix.clone();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] *= scale[i] * scale[j];
            }
        }
        Ok(out)
    }
}

impl GraphModel {
    pub fn new(
        b: DMatrix<f64>,
        blocks: Vec<usize>,
        theta: Vec<f64>,
        edge_law: EdgeLaw,
    ) -> Result<Self> {
        let k = b.nrows();
        if b.ncols() != k {
            return Err(Error::DimensionMismatch {
                context: format!("block matrix must be square, got {} x {}", k, b.ncols()),
            });
        }
        if k == 0 {
            return Err(Error::InvalidParameter("block matrix is empty".into()));
        }
        for i in 0..k {
            for j in 0..k {
                let x = b[(i, j)];
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "block matrix entry ({i}, {j}) = {x} must be finite and nonnegative"
                    )));
                }
                if (b[(i, j)] - b[(j, i)]).abs() > 1e-12 * x.abs().max(1.0) {
                    return Err(Error::InvalidParameter(
                        "block matrix must be symmetric".into(),
                    ));
                }
            }
        }
        if blocks.len() != theta.len() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "{} block labels but {} theta entries",
                    blocks.len(),
                    theta.len()
                ),
            });
        }
        if let Some(&bad) = blocks.iter().find(|&&z| z >= k) {
            return Err(Error::IndexOutOfRange { index: bad, bound: k });
        }
        if theta.iter().any(|&t| !t.is_finite() || t < 0.0) {
            return Err(Error::InvalidParameter(
                "theta entries must be finite and nonnegative".into(),
            ));
        }
        let model = GraphModel {
            n: blocks.len(),
            k,
            b,
            blocks,
            theta,
            edge_law,
        };
        if edge_law == EdgeLaw::Bernoulli {
            let max_p = model.max_edge_probability();
            if max_p > 1.0 + 1e-12 {
                return Err(Error::BernoulliInfeasible { max_p });
            }
        }
        Ok(model)
    }

    /// Model with blocks assigned uniformly at random and theta drawn from
    /// `theta_spec`, both governed by `seed_value`.
    pub fn sbm(
        n: usize,
        b: DMatrix<f64>,
        theta_spec: &ThetaSpec,
        unit_sum_theta: bool,
        edge_law: EdgeLaw,
        seed_value: u64,
    ) -> Result<Self> {
        let k = b.nrows();
        if k == 0 {
            return Err(Error::InvalidParameter("block matrix is empty".into()));
        }
        let mut rng = seed::rng(seed::mix(seed_value, BLOCK_STREAM));
        let blocks: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        let mut theta = theta_spec.draw(n, seed::mix(seed_value, THETA_STREAM))?;
        if unit_sum_theta {
            let total: f64 = theta.iter().sum();
            if total <= 0.0 {
                return Err(Error::InvalidParameter(
                    "theta sums to zero, cannot normalize".into(),
                ));
            }
            for t in &mut theta {
                *t /= total;
            }
        }
        GraphModel::new(b, blocks, theta, edge_law)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn block_matrix(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn edge_law(&self) -> EdgeLaw {
        self.edge_law
    }

    /// Average expected degree `(1/n) sum_ij P_ij`, computed from block
    /// aggregates without materializing `P`.
    pub fn expected_mean_degree(&self) -> f64 {
        let mut s = vec![0.0; self.k];
        for (&z, &t) in self.blocks.iter().zip(&self.theta) {
            s[z] += t;
        }
        let mut total = 0.0;
        for u in 0..self.k {
            for v in 0..self.k {
                total += s[u] * self.b[(u, v)] * s[v];
            }
        }
        total / self.n as f64
    }

    /// Largest entry of the expected adjacency matrix.
    pub fn max_edge_probability(&self) -> f64 {
        let mut max_theta = vec![0.0f64; self.k];
        for (&z, &t) in self.blocks.iter().zip(&self.theta) {
            max_theta[z] = max_theta[z].max(t);
        }
        let mut max_p = 0.0f64;
        for u in 0..self.k {
            for v in 0..self.k {
                max_p = max_p.max(max_theta[u] * self.b[(u, v)] * max_theta[v]);
            }
        }
        max_p
    }

    /// Rescales the block matrix so the average expected degree hits
    /// `target`. Theta is left as drawn.
    pub fn degree_scaled(&self, target: f64) -> Result<GraphModel> {
        if !(target > 0.0) {
            return Err(Error::InvalidParameter(
                "target mean degree must be positive".into(),
            ));
        }
        let current = self.expected_mean_degree();
        if current <= 0.0 {
            return Err(Error::InvalidParameter(
                "model has zero expected degree, cannot rescale".into(),
            ));
        }
        GraphModel::new(
            &self.b * (target / current),
            self.blocks.clone(),
            self.theta.clone(),
            self.edge_law,
        )
    }

    /// The same model under a different edge law. Bernoulli feasibility is
    /// re-checked against the current rates.
    pub fn with_edge_law(&self, edge_law: EdgeLaw) -> Result<GraphModel> {
        GraphModel::new(
            self.b.clone(),
            self.blocks.clone(),
            self.theta.clone(),
            edge_law,
        )
    }

    /// Materializes the dense expected adjacency matrix (diagonal included).
    pub fn expected_adjacency(&self) -> Result<ExpectedAdjacency> {
        if self.n > EXPECTED_ADJACENCY_LIMIT {
            return Err(Error::SizeGuard {
                n: self.n,
                limit: EXPECTED_ADJACENCY_LIMIT,
            });
        }
        let matrix = DMatrix::from_fn(self.n, self.n, |i, j| {
            self.theta[i] * self.theta[j] * self.b[(self.blocks[i], self.blocks[j])]
        });
        Ok(ExpectedAdjacency {
            matrix,
            rank_bound: self.k,
        })
    }

    /// Draws one graph. Upper-triangle entries (diagonal included) are
    /// sampled independently row by row and mirrored, so the result is
    /// symmetric. Bernoulli models with an expected entry above 1 are
    /// rejected.
    pub fn sample(&self, seed_value: u64) -> Result<SparseGraph> {
        if self.edge_law == EdgeLaw::Bernoulli {
            let max_p = self.max_edge_probability();
            if max_p > 1.0 + 1e-12 {
                return Err(Error::BernoulliInfeasible { max_p });
            }
        }
        let rows: Vec<Vec<(usize, usize, f64)>> = (0..self.n)
            .into_par_iter()
            .map(|i| {
                let mut rng = seed::rng(seed::mix(seed_value, i as u64));
                let mut out = Vec::new();
                // Row-specific slice of B, so the inner loop is one multiply.
                let zi = self.blocks[i];
                let ti = self.theta[i];
                for j in i..self.n {
                    let p = ti * self.theta[j] * self.b[(zi, self.blocks[j])];
                    if p <= 0.0 {
                        continue;
                    }
                    let w = match self.edge_law {
                        EdgeLaw::Bernoulli => {
                            if rng.gen::<f64>() < p {
                                1.0
                            } else {
                                0.0
                            }
                        }
                        EdgeLaw::Poisson => {
                            let dist = rand_distr::Poisson::new(p).expect("positive mean");
                            dist.sample(&mut rng)
                        }
                    };
                    if w > 0.0 {
                        out.push((i, j, w));
                    }
                }
                out
            })
            .collect();

        let mut triples: Vec<(usize, usize, f64)> = Vec::new();
        for row in rows {
            for (i, j, w) in row {
                triples.push((i, j, w));
                if j != i {
                    triples.push((j, i, w));
                }
            }
        }
        SparseGraph::from_edge_list(self.n, self.n, &triples, true)
    }
}

/// Depth of the most recent common ancestor of two leaves of a complete
/// binary tree, with leaves indexed by `depth`-bit integers.
fn mrca_depth(u: usize, v: usize, depth: u32) -> u32 {
    let x = u ^ v;
    if x == 0 {
        depth
    } else {
        let highest = usize::BITS - x.leading_zeros();
        depth - highest
    }
}

/// Block matrix of the binary-tree hierarchy: `2^depth` blocks with
/// `B[u][v] = p * 2^g(u, v)` where `g` is the depth of the most recent
/// common ancestor (and `g(u, u)` is the tree depth).
pub fn hierarchical_block_matrix(depth: u32, p: f64) -> Result<DMatrix<f64>> {
    if depth == 0 || depth > 20 {
        return Err(Error::InvalidParameter(
            "hierarchy depth must be between 1 and 20".into(),
        ));
    }
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(
            "hierarchy base rate p must be positive".into(),
        ));
    }
    let k = 1usize << depth;
    Ok(DMatrix::from_fn(k, k, |u, v| {
        p * f64::powi(2.0, mrca_depth(u, v, depth) as i32)
    }))
}

/// Model over the binary-tree block hierarchy with uniformly random block
/// memberships.
pub fn hierarchical_model(
    depth: u32,
    p: f64,
    n: usize,
    theta_spec: &ThetaSpec,
    edge_law: EdgeLaw,
    seed_value: u64,
) -> Result<GraphModel> {
    let b = hierarchical_block_matrix(depth, p)?;
    GraphModel::sbm(n, b, theta_spec, false, edge_law, seed_value)
}

/// On-disk description of a model, deserialized from JSON.
///
/// Either `k` + `b` or `hierarchical` must be present. `seed` governs the
/// model's own randomness (block memberships and theta draws); the seed for
/// sampling a graph from the model is supplied separately.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub n: usize,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub b: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub hierarchical: Option<HierarchicalSpec>,
    pub theta: ThetaSpec,
    #[serde(default)]
    pub theta_unit_sum: bool,
    pub edge_law: EdgeLaw,
    #[serde(default)]
    pub blocks: Option<Vec<usize>>,
    #[serde(default)]
    pub target_mean_degree: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HierarchicalSpec {
    pub depth: u32,
    pub p: f64,
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model spec serializes")
    }

    /// Realizes the spec into a sampleable model.
    pub fn build(&self) -> Result<GraphModel> {
        let b = match (&self.hierarchical, &self.b) {
            (Some(h), None) => hierarchical_block_matrix(h.depth, h.p)?,
            (None, Some(rows)) => {
                let k = self.k.ok_or_else(|| {
                    Error::InvalidParameter("model spec with 'b' must also give 'k'".into())
                })?;
                if rows.len() != k || rows.iter().any(|r| r.len() != k) {
                    return Err(Error::DimensionMismatch {
                        context: format!("'b' must be a {k} x {k} matrix"),
                    });
                }
                DMatrix::from_fn(k, k, |i, j| rows[i][j])
            }
            (Some(_), Some(_)) => {
                return Err(Error::InvalidParameter(
                    "model spec gives both 'b' and 'hierarchical'".into(),
                ))
            }
            (None, None) => {
                return Err(Error::InvalidParameter(
                    "model spec needs either 'b' or 'hierarchical'".into(),
                ))
            }
        };
        // When the spec will be rescaled to a target degree, edge-law
        // feasibility is a property of the rescaled rates, not of the
        // template, so the intermediate model is built under Poisson (which
        // has no rate cap) and the requested law is restored after scaling.
        let build_law = match self.target_mean_degree {
            Some(_) => EdgeLaw::Poisson,
            None => self.edge_law,
        };
        let model = match &self.blocks {
            Some(blocks) => {
                let mut theta = self
                    .theta
                    .draw(self.n, seed::mix(self.seed, THETA_STREAM))?;
                if self.theta_unit_sum {
                    let total: f64 = theta.iter().sum();
                    if total <= 0.0 {
                        return Err(Error::InvalidParameter(
                            "theta sums to zero, cannot normalize".into(),
                        ));
                    }
                    for t in &mut theta {
                        *t /= total;
                    }
                }
                if blocks.len() != self.n {
                    return Err(Error::DimensionMismatch {
                        context: format!(
                            "{} explicit block labels for n = {}",
                            blocks.len(),
                            self.n
                        ),
                    });
                }
                GraphModel::new(b, blocks.clone(), theta, build_law)?
            }
            None => GraphModel::sbm(
                self.n,
                b,
                &self.theta,
                self.theta_unit_sum,
                build_law,
                self.seed,
            )?,
        };
        match self.target_mean_degree {
            Some(target) => model.degree_scaled(target)?.with_edge_law(self.edge_law),
            None => Ok(model),
        }
    }
}

/// The two-block family used throughout the calibration studies: equal
/// within-block rates, between-block rate smaller by `ratio`, rescaled to a
/// target mean degree.
pub fn two_block_model(
    n: usize,
    ratio: f64,
    mean_degree: f64,
    edge_law: EdgeLaw,
    seed_value: u64,
) -> Result<GraphModel> {
    let b = DMatrix::from_fn(2, 2, |i, j| if i == j { ratio } else { 1.0 });
    let model = GraphModel::sbm(
        n,
        b,
        &ThetaSpec::PointMass { value: 1.0 },
        false,
        EdgeLaw::Poisson,
        seed_value,
    )?;
    model.degree_scaled(mean_degree)?.with_edge_law(edge_law)
}
