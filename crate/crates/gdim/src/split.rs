//! Edge splitting: thinning a multigraph into a fitting graph and a test
//! graph.
//!
//! Each edge (each unit of integer weight) lands in the test graph
//! independently with probability `epsilon`, so conditionally on the input
//! the test weight of an entry is `Binomial(weight, epsilon)` and the
//! fitting weight is the remainder. The two add back to the input exactly.
//! For symmetric graphs the upper triangle is split and mirrored so both
//! halves stay symmetric.
//!
//! Draws are keyed by `(seed, row)`, making a split reproducible and
//! independent of traversal order.

use rand_distr::Distribution;

use crate::graph::SparseGraph;
use crate::{seed, Error, Result};

/// The two halves of a split; `fit.get(i, j) + test.get(i, j)` reproduces
/// the input weight at every entry.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub fit: SparseGraph,
    pub test: SparseGraph,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "split probability must lie strictly between 0 and 1, got {epsilon}"
        )));
    }
    Ok(())
}

/// Splits a graph with nonnegative integer weights into fitting and test
/// halves.
pub fn split(g: &SparseGraph, epsilon: f64, seed_value: u64) -> Result<SplitPair> {
    check_epsilon(epsilon)?;
    g.integer_weights()?;

    let mut fit: Vec<(usize, usize, f64)> = Vec::with_capacity(g.nnz());
    let mut test: Vec<(usize, usize, f64)> = Vec::with_capacity(g.nnz());
    let push = |store: &mut Vec<(usize, usize, f64)>, i: usize, j: usize, w: u64| {
        if w > 0 {
            store.push((i, j, w as f64));
            if g.is_symmetric() && i != j {
                store.push((j, i, w as f64));
            }
        }
    };

    for i in 0..g.n_rows() {
        let (cols, weights) = g.row(i);
        let mut rng = seed::rng(seed::mix(seed_value, i as u64));
        for (&j, &w) in cols.iter().zip(weights) {
            if g.is_symmetric() && j < i {
                continue;
            }
            let count = w.round() as u64;
            let to_test = rand_distr::Binomial::new(count, epsilon)
                .expect("validated probability")
                .sample(&mut rng);
            push(&mut test, i, j, to_test);
            push(&mut fit, i, j, count - to_test);
        }
    }

    Ok(SplitPair {
        fit: SparseGraph::from_edge_list(g.n_rows(), g.n_cols(), &fit, g.is_symmetric())?,
        test: SparseGraph::from_edge_list(g.n_rows(), g.n_cols(), &test, g.is_symmetric())?,
    })
}

/// Independent splits for `folds` cross-validation folds, with fold `f`
/// drawn from the child seed `mix(seed_value, f)`.
pub fn multi_split(
    g: &SparseGraph,
    epsilon: f64,
    folds: usize,
    seed_value: u64,
) -> Result<Vec<SplitPair>> {
    if folds == 0 {
        return Err(Error::InvalidParameter(
            "at least one fold is required".into(),
        ));
    }
    (0..folds)
        .map(|f| split(g, epsilon, seed::mix(seed_value, f as u64)))
        .collect()
}
