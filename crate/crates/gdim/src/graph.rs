//! Sparse graph storage and the handful of linear-algebra primitives the
//! estimators need: degrees, the regularized Laplacian, quadratic forms, and
//! matrix-vector products.
//!
//! Graphs are adjacency matrices in compressed sparse row form with `f64`
//! weights. A symmetric graph stores both `(i, j)` and `(j, i)` so that row
//! operations never need to consult the transpose. Weights are nonnegative
//! and finite; duplicate entries are summed at construction and explicit
//! zeros are dropped.

use crate::{Error, Result};

/// Adjacency matrix in CSR form.
///
/// `symmetric` records whether the matrix is guaranteed symmetric; when set,
/// every off-diagonal entry is stored in both orientations with equal weight.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseGraph {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

impl SparseGraph {
    /// Builds a graph from `(row, col, weight)` triples.
    ///
    /// Duplicate triples are summed and entries that sum to zero are dropped.
    /// With `symmetric` set, the matrix must be square; an entry supplied in
    /// only one orientation is mirrored, while entries supplied in both
    /// orientations must agree.
    pub fn from_edge_list(
        n_rows: usize,
        n_cols: usize,
        triples: &[(usize, usize, f64)],
        symmetric: bool,
    ) -> Result<Self> {
        if symmetric && n_rows != n_cols {
            return Err(Error::SymmetricShape {
                rows: n_rows,
                cols: n_cols,
            });
        }
        for &(i, j, w) in triples {
            if i >= n_rows {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    bound: n_rows,
                });
            }
            if j >= n_cols {
                return Err(Error::IndexOutOfRange {
                    index: j,
                    bound: n_cols,
                });
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::NegativeWeight {
                    row: i,
                    col: j,
                    value: w,
                });
            }
        }

        let mut entries: Vec<(usize, usize, f64)> =
            triples.iter().copied().filter(|&(_, _, w)| w != 0.0).collect();
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        // Sum duplicates in place.
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (i, j, w) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += w,
                _ => merged.push((i, j, w)),
            }
        }

        if symmetric {
            merged = mirror_entries(merged)?;
        }
        merged.retain(|&(_, _, w)| w != 0.0);

        Ok(Self::from_sorted_entries(n_rows, n_cols, merged, symmetric))
    }

    fn from_sorted_entries(
        n_rows: usize,
        n_cols: usize,
        entries: Vec<(usize, usize, f64)>,
        symmetric: bool,
    ) -> Self {
        let mut row_ptr = vec![0usize; n_rows + 1];
        for &(i, _, _) in &entries {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (_, j, w) in entries {
            col_idx.push(j);
            values.push(w);
        }
        SparseGraph {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
            symmetric,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    /// Number of stored entries (both orientations count for symmetric graphs).
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored weight at `(i, j)`, or zero when absent.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(pos) => self.values[lo + pos],
            Err(_) => 0.0,
        }
    }

    /// Iterates over stored `(row, col, weight)` entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            (lo..hi).map(move |p| (i, self.col_idx[p], self.values[p]))
        })
    }

    /// Row `i` as parallel `(columns, weights)` slices.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// Sum of all stored weights.
    pub fn total_weight(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Diagonal of the adjacency matrix as a dense vector.
    pub fn diagonal(&self) -> Vec<f64> {
        let n = self.n_rows.min(self.n_cols);
        (0..n).map(|i| self.get(i, i)).collect()
    }

    /// Row sums `d_i = sum_j A_ij`. A self-loop contributes its stored
    /// weight once.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n_rows];
        for i in 0..self.n_rows {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            d[i] = self.values[lo..hi].iter().sum();
        }
        d
    }

    /// `out = A x`.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n_cols, "matvec input length");
        assert_eq!(out.len(), self.n_rows, "matvec output length");
        for i in 0..self.n_rows {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            let mut acc = 0.0;
            for p in lo..hi {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            out[i] = acc;
        }
    }

    /// `out = A^T x`.
    pub fn matvec_transpose(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n_rows, "matvec_transpose input length");
        assert_eq!(out.len(), self.n_cols, "matvec_transpose output length");
        out.fill(0.0);
        for i in 0..self.n_rows {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for p in lo..hi {
                out[self.col_idx[p]] += self.values[p] * xi;
            }
        }
    }

    /// Bilinear form `x^T A y` in one pass over the stored entries.
    pub fn quadratic_form(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n_rows, "quadratic_form left length");
        assert_eq!(y.len(), self.n_cols, "quadratic_form right length");
        let mut acc = 0.0;
        for i in 0..self.n_rows {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            let mut row_acc = 0.0;
            for p in lo..hi {
                row_acc += self.values[p] * y[self.col_idx[p]];
            }
            acc += xi * row_acc;
        }
        acc
    }

    /// Degree-regularized normalization `L = D A D` with
    /// `D_ii = (d_i + tau)^{-1/2}` and `tau` the mean degree.
    ///
    /// The mean degree is computed from this graph's own degrees, so the
    /// result is invariant under rescaling all weights by a constant. Errors
    /// on a graph with no edges, where the normalization is undefined.
    pub fn regularized_laplacian(&self) -> Result<SparseGraph> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "regularized Laplacian needs a square graph, got {} x {}",
                    self.n_rows, self.n_cols
                ),
            });
        }
        let d = self.degrees();
        let tau = d.iter().sum::<f64>() / self.n_rows.max(1) as f64;
        if tau <= 0.0 {
            return Err(Error::EmptyGraph {
                context: "regularized Laplacian is undefined".into(),
            });
        }
        let scale: Vec<f64> = d.iter().map(|&di| 1.0 / (di + tau).sqrt()).collect();
        let mut values = self.values.clone();
        for i in 0..self.n_rows {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            for p in lo..hi {
                values[p] *= scale[i] * scale[self.col_idx[p]];
            }
        }
        Ok(SparseGraph {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values,
            symmetric: self.symmetric,
        })
    }

    /// Undirected, unweighted version of a square graph: entry `(i, j)` is 1
    /// exactly when `A_ij > 0` or `A_ji > 0`.
    pub fn symmetrize(&self) -> Result<SparseGraph> {
        if !self.is_square() {
            return Err(Error::SymmetricShape {
                rows: self.n_rows,
                cols: self.n_cols,
            });
        }
        let mut triples: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * self.nnz());
        for (i, j, _) in self.entries() {
            triples.push((i, j, 1.0));
            triples.push((j, i, 1.0));
        }
        triples.sort_unstable_by_key(|&(i, j, _)| (i, j));
        triples.dedup_by_key(|&mut (i, j, _)| (i, j));
        Ok(SparseGraph::from_sorted_entries(
            self.n_rows,
            self.n_cols,
            triples,
            true,
        ))
    }

    /// Checks that every weight is a nonnegative integer (within 1e-9) and
    /// returns the weights rounded. Multigraph counts are what the edge
    /// splitter consumes.
    pub fn integer_weights(&self) -> Result<()> {
        for (i, j, w) in self.entries() {
            if (w - w.round()).abs() > 1e-9 || w < 0.0 {
                return Err(Error::NonIntegerWeight {
                    row: i,
                    col: j,
                    value: w,
                });
            }
        }
        Ok(())
    }
}

fn mirror_entries(merged: Vec<(usize, usize, f64)>) -> Result<Vec<(usize, usize, f64)>> {
    use std::collections::BTreeMap;
    let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (i, j, w) in merged {
        map.insert((i, j), w);
    }
    let keys: Vec<(usize, usize)> = map.keys().copied().collect();
    for (i, j) in keys {
        if i == j {
            continue;
        }
        let w = map[&(i, j)];
        match map.get(&(j, i)) {
            None => {
                map.insert((j, i), w);
            }
            Some(&w2) => {
                if w != w2 {
                    let (row, col) = if i < j { (i, j) } else { (j, i) };
                    return Err(Error::SymmetricConflict { row, col });
                }
            }
        }
    }
    Ok(map.into_iter().map(|((i, j), w)| (i, j, w)).collect())
}
