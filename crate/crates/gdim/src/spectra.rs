//! Truncated eigendecompositions and SVDs of sparse operators, plus dense
//! reference decompositions for small matrices.
//!
//! The iterative solvers are Krylov methods with full reorthogonalization:
//! Lanczos tridiagonalization for symmetric eigenproblems and Golub-Kahan
//! bidiagonalization for singular triplets. The basis grows until every
//! requested pair passes an explicit residual check, so a returned basis is
//! certified rather than hoped-for. Exact breakdowns restart the recurrence
//! with a fresh random direction orthogonal to everything found so far,
//! which keeps invariant subspaces from stalling the sweep.
//!
//! "Leading" always means largest algebraic eigenvalue (or largest singular
//! value). Every returned vector has its largest-magnitude entry positive,
//! ties broken by lowest index; for singular pairs the convention is applied
//! to the left vector and the right vector is flipped in tandem so that
//! `A v = sigma u` keeps holding.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::SparseGraph;
use crate::{seed, Error, Result};

/// Maximum size accepted by the dense reference decompositions.
pub const DENSE_ORACLE_LIMIT: usize = 2000;

/// Anything that can act as a matrix on dense vectors.
pub trait LinearOp {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `out = M x`
    fn apply(&self, x: &[f64], out: &mut [f64]);
    /// `out = M^T x`
    fn apply_transpose(&self, x: &[f64], out: &mut [f64]);
}

impl LinearOp for SparseGraph {
    fn nrows(&self) -> usize {
        self.n_rows()
    }
    fn ncols(&self) -> usize {
        self.n_cols()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.matvec(x, out);
    }
    fn apply_transpose(&self, x: &[f64], out: &mut [f64]) {
        self.matvec_transpose(x, out);
    }
}

impl LinearOp for DMatrix<f64> {
    fn nrows(&self) -> usize {
        self.nrows()
    }
    fn ncols(&self) -> usize {
        self.ncols()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.nrows() {
            let mut acc = 0.0;
            for j in 0..self.ncols() {
                acc += self[(i, j)] * x[j];
            }
            out[i] = acc;
        }
    }
    fn apply_transpose(&self, x: &[f64], out: &mut [f64]) {
        for j in 0..self.ncols() {
            let mut acc = 0.0;
            for i in 0..self.nrows() {
                acc += self[(i, j)] * x[i];
            }
            out[j] = acc;
        }
    }
}

/// Leading eigenpairs or singular triplets, values sorted non-increasing.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    values: Vec<f64>,
    right: Vec<Vec<f64>>,
    left: Option<Vec<Vec<f64>>>,
}

impl SpectralBasis {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Eigenvector (or right singular vector) `j`.
    pub fn vector(&self, j: usize) -> &[f64] {
        &self.right[j]
    }

    /// Left singular vector `j`; present only for SVD results.
    pub fn left_vector(&self, j: usize) -> Option<&[f64]> {
        self.left.as_ref().map(|u| u[j].as_slice())
    }

    pub fn is_svd(&self) -> bool {
        self.left.is_some()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Two passes of classical Gram-Schmidt against every basis vector.
fn reorthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for v in basis {
            let c = dot(w, v);
            if c != 0.0 {
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= c * vi;
                }
            }
        }
    }
}

/// Random unit vector orthogonal to `basis`, for restarting after breakdown.
fn fresh_direction(rng: &mut ChaCha8Rng, dim: usize, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    for _ in 0..32 {
        let mut w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        reorthogonalize(&mut w, basis);
        let nrm = norm(&w);
        if nrm > 1e-8 {
            for wi in &mut w {
                *wi /= nrm;
            }
            return Some(w);
        }
    }
    None
}

/// Makes the largest-magnitude entry positive; returns true if flipped.
fn canonical_sign(v: &mut [f64]) -> bool {
    let mut best = 0usize;
    let mut best_abs = -1.0;
    for (i, &x) in v.iter().enumerate() {
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
        true
    } else {
        false
    }
}

fn validate_request(m: usize, limit: usize, tol: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "at least one spectral pair must be requested".into(),
        ));
    }
    if m > limit {
        return Err(Error::InvalidParameter(format!(
            "requested {m} spectral pairs from an operator that has at most {limit}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(
            "residual tolerance must be positive".into(),
        ));
    }
    Ok(())
}

/// Leading `m` eigenpairs (largest algebraic eigenvalues) of a symmetric
/// operator.
///
/// Convergence means an explicit residual bound
/// `||M v - lambda v|| <= tol * max(1, |lambda|)` for every returned pair.
/// `max_matvecs` caps the number of operator applications; exceeding it is
/// reported as [`Error::NonConvergence`] with no partial results.
pub fn top_eigen<M: LinearOp>(
    op: &M,
    m: usize,
    tol: f64,
    max_matvecs: usize,
    seed_value: u64,
) -> Result<SpectralBasis> {
    let n = op.nrows();
    if n != op.ncols() {
        return Err(Error::DimensionMismatch {
            context: format!("top_eigen needs a square operator, got {} x {}", n, op.ncols()),
        });
    }
    validate_request(m, n, tol)?;

    let mut rng = seed::rng(seed_value);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new(); // beta[j] couples v_j and v_{j+1}
    let mut matvecs = 0usize;
    let mut scale = 1.0f64;

    let v0 = fresh_direction(&mut rng, n, &basis).ok_or(Error::NonConvergence {
        converged: 0,
        requested: m,
    })?;
    basis.push(v0);

    let mut target = n.min((2 * m + 10).max(30));
    loop {
        // Grow the Lanczos basis up to the current target dimension.
        while basis.len() < target {
            if matvecs >= max_matvecs {
                return Err(Error::NonConvergence {
                    converged: 0,
                    requested: m,
                });
            }
            let j = basis.len() - 1;
            let mut w = vec![0.0; n];
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            let a = dot(&basis[j], &w);
            alpha.push(a);
            scale = scale.max(a.abs());
            reorthogonalize(&mut w, &basis);
            let b = norm(&w);
            if b > 1e-12 * scale.max(1.0) {
                scale = scale.max(b);
                beta.push(b);
                for wi in &mut w {
                    *wi /= b;
                }
                basis.push(w);
            } else {
                // Exact breakdown: the span is invariant, restart in its
                // orthogonal complement.
                match fresh_direction(&mut rng, n, &basis) {
                    Some(v) => {
                        beta.push(0.0);
                        basis.push(v);
                    }
                    None => break, // basis spans the whole space
                }
            }
        }

        let p = basis.len();
        // alpha has one entry per completed step. The last basis vector has
        // not been stepped yet, so compute its diagonal entry into a local
        // copy: the grow loop will push the committed entry itself if the
        // basis grows further.
        let mut alpha_full = alpha.clone();
        if alpha_full.len() < p {
            if matvecs >= max_matvecs {
                return Err(Error::NonConvergence {
                    converged: 0,
                    requested: m,
                });
            }
            let mut w = vec![0.0; n];
            op.apply(&basis[p - 1], &mut w);
            matvecs += 1;
            alpha_full.push(dot(&basis[p - 1], &w));
        }

        // Projected problem: symmetric tridiagonal, solved densely.
        let mut t = DMatrix::zeros(p, p);
        for (j, &a) in alpha_full.iter().take(p).enumerate() {
            t[(j, j)] = a;
        }
        for (j, &b) in beta.iter().take(p - 1).enumerate() {
            t[(j, j + 1)] = b;
            t[(j + 1, j)] = b;
        }
        let eig = nalgebra::SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

        let take = m.min(p);
        let mut values = Vec::with_capacity(take);
        let mut vectors = Vec::with_capacity(take);
        for &idx in order.iter().take(take) {
            let s = eig.eigenvectors.column(idx);
            let mut y = vec![0.0; n];
            for (vj, &sj) in basis.iter().zip(s.iter()) {
                for (yi, &vji) in y.iter_mut().zip(vj) {
                    *yi += sj * vji;
                }
            }
            let nrm = norm(&y);
            for yi in &mut y {
                *yi /= nrm;
            }
            values.push(eig.eigenvalues[idx]);
            vectors.push(y);
        }

        let mut converged = 0usize;
        if take == m {
            for (lam, y) in values.iter().zip(&vectors) {
                let mut r = vec![0.0; n];
                op.apply(y, &mut r);
                matvecs += 1;
                for (ri, yi) in r.iter_mut().zip(y) {
                    *ri -= lam * yi;
                }
                if norm(&r) <= tol * lam.abs().max(1.0) {
                    converged += 1;
                } else {
                    break;
                }
            }
            if converged == m {
                for v in &mut vectors {
                    canonical_sign(v);
                }
                return Ok(SpectralBasis {
                    values,
                    right: vectors,
                    left: None,
                });
            }
        }

        if p >= n || matvecs >= max_matvecs {
            return Err(Error::NonConvergence {
                converged,
                requested: m,
            });
        }
        target = n.min(target + (m.max(20)));
    }
}

/// Random unit vector in the range of `A` (or of `A^T`) orthogonal to
/// `basis`: the image of a random direction, reorthogonalized. Keeping
/// restart vectors inside the operator's range keeps null-space directions
/// out of the recurrence.
fn fresh_range_direction<M: LinearOp>(
    rng: &mut ChaCha8Rng,
    op: &M,
    transpose: bool,
    basis: &[Vec<f64>],
    scale: f64,
    matvecs: &mut usize,
) -> Option<Vec<f64>> {
    let (zdim, wdim) = if transpose {
        (op.nrows(), op.ncols())
    } else {
        (op.ncols(), op.nrows())
    };
    for _ in 0..32 {
        let z: Vec<f64> = (0..zdim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut w = vec![0.0; wdim];
        if transpose {
            op.apply_transpose(&z, &mut w);
        } else {
            op.apply(&z, &mut w);
        }
        *matvecs += 1;
        reorthogonalize(&mut w, basis);
        let nrm = norm(&w);
        if nrm > 1e-10 * scale.max(1.0) {
            for wi in &mut w {
                *wi /= nrm;
            }
            return Some(w);
        }
    }
    None
}

/// Leading `m` singular triplets of a (possibly rectangular) operator.
///
/// Residual contract: `||M v - sigma u|| <= tol * max(1, sigma)` and the
/// transposed counterpart, checked explicitly for every returned triplet.
pub fn top_svd<M: LinearOp>(
    op: &M,
    m: usize,
    tol: f64,
    max_matvecs: usize,
    seed_value: u64,
) -> Result<SpectralBasis> {
    let r = op.nrows();
    let c = op.ncols();
    let limit = r.min(c);
    validate_request(m, limit, tol)?;

    let mut rng = seed::rng(seed_value);
    let mut vs: Vec<Vec<f64>> = Vec::new(); // right basis, length c each
    let mut us: Vec<Vec<f64>> = Vec::new(); // left basis, length r each
    let mut alpha: Vec<f64> = Vec::new(); // B[j][j]
    let mut beta: Vec<f64> = Vec::new(); // B[j][j+1]
    let mut matvecs = 0usize;
    let mut scale = 1.0f64;

    // Starting in the range of A^T keeps the null space of A out of the
    // sweep entirely, so rank-many steps suffice.
    let v0 = fresh_range_direction(&mut rng, op, true, &vs, 0.0, &mut matvecs).ok_or(
        Error::NonConvergence {
            converged: 0,
            requested: m,
        },
    )?;
    vs.push(v0);

    let mut target = limit.min((2 * m + 10).max(30));
    loop {
        // Invariant at the top of each step: vs is one vector ahead of us,
        // alpha and beta each hold one entry per completed u.
        let before = us.len();
        'grow: while us.len() < target {
            if matvecs + 2 > max_matvecs {
                return Err(Error::NonConvergence {
                    converged: 0,
                    requested: m,
                });
            }
            let j = us.len();
            // Left step: u_j from A v_j.
            let mut w = vec![0.0; r];
            op.apply(&vs[j], &mut w);
            matvecs += 1;
            if j > 0 {
                let b = beta[j - 1];
                for (wi, ui) in w.iter_mut().zip(&us[j - 1]) {
                    *wi -= b * ui;
                }
            }
            reorthogonalize(&mut w, &us);
            let a = norm(&w);
            if a > 1e-12 * scale.max(1.0) {
                scale = scale.max(a);
                alpha.push(a);
                for wi in &mut w {
                    *wi /= a;
                }
                us.push(w);
            } else {
                match fresh_range_direction(&mut rng, op, false, &us, scale, &mut matvecs) {
                    Some(u) => {
                        alpha.push(0.0);
                        us.push(u);
                    }
                    None => break 'grow, // range of A exhausted
                }
            }

            // Right step: v_{j+1} from A^T u_j, keeping vs one ahead. Skipped
            // only when the right basis already spans all of R^c.
            if vs.len() >= c {
                continue;
            }
            let mut w = vec![0.0; c];
            op.apply_transpose(&us[j], &mut w);
            matvecs += 1;
            let a = alpha[j];
            for (wi, vi) in w.iter_mut().zip(&vs[j]) {
                *wi -= a * vi;
            }
            reorthogonalize(&mut w, &vs);
            let b = norm(&w);
            if b > 1e-12 * scale.max(1.0) {
                scale = scale.max(b);
                beta.push(b);
                for wi in &mut w {
                    *wi /= b;
                }
                vs.push(w);
            } else {
                match fresh_range_direction(&mut rng, op, true, &vs, scale, &mut matvecs) {
                    Some(v) => {
                        beta.push(0.0);
                        vs.push(v);
                    }
                    None => break 'grow, // range of A^T exhausted
                }
            }
        }

        let p = us.len();
        if p == 0 || (p < target && p == before) {
            // No progress is possible: the operator ran out of range
            // directions before `m` triplets could be certified.
            return Err(Error::NonConvergence {
                converged: 0,
                requested: m,
            });
        }
        // Projected bidiagonal factor: B[j][j] = alpha_j, B[j][j+1] = beta_j.
        let mut bmat = DMatrix::zeros(p, p);
        for j in 0..p {
            bmat[(j, j)] = alpha[j];
            if j + 1 < p {
                bmat[(j, j + 1)] = beta[j];
            }
        }
        let svd = nalgebra::SVD::new(bmat, true, true);
        let su = svd.u.as_ref().unwrap();
        let svt = svd.v_t.as_ref().unwrap();
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| {
            svd.singular_values[b]
                .partial_cmp(&svd.singular_values[a])
                .unwrap()
        });

        let take = m.min(p);
        let mut values = Vec::with_capacity(take);
        let mut rights = Vec::with_capacity(take);
        let mut lefts = Vec::with_capacity(take);
        for &idx in order.iter().take(take) {
            values.push(svd.singular_values[idx]);
            let mut u = vec![0.0; r];
            for (k, uk) in us.iter().take(p).enumerate() {
                let s = su[(k, idx)];
                for (ui, &uki) in u.iter_mut().zip(uk) {
                    *ui += s * uki;
                }
            }
            let mut v = vec![0.0; c];
            for (k, vk) in vs.iter().take(p).enumerate() {
                let s = svt[(idx, k)];
                for (vi, &vki) in v.iter_mut().zip(vk) {
                    *vi += s * vki;
                }
            }
            let un = norm(&u);
            let vn = norm(&v);
            for ui in &mut u {
                *ui /= un;
            }
            for vi in &mut v {
                *vi /= vn;
            }
            lefts.push(u);
            rights.push(v);
        }

        let mut converged = 0usize;
        if take == m {
            for ((sig, u), v) in values.iter().zip(&lefts).zip(&rights) {
                let mut rv = vec![0.0; r];
                op.apply(v, &mut rv);
                matvecs += 1;
                for (x, ui) in rv.iter_mut().zip(u) {
                    *x -= sig * ui;
                }
                let mut ru = vec![0.0; c];
                op.apply_transpose(u, &mut ru);
                matvecs += 1;
                for (x, vi) in ru.iter_mut().zip(v) {
                    *x -= sig * vi;
                }
                let bound = tol * sig.max(1.0);
                if norm(&rv) <= bound && norm(&ru) <= bound {
                    converged += 1;
                } else {
                    break;
                }
            }
            if converged == m {
                for (u, v) in lefts.iter_mut().zip(&mut rights) {
                    if canonical_sign(u) {
                        for x in v.iter_mut() {
                            *x = -*x;
                        }
                    }
                }
                return Ok(SpectralBasis {
                    values,
                    right: rights,
                    left: Some(lefts),
                });
            }
        }

        if p >= limit || matvecs >= max_matvecs {
            return Err(Error::NonConvergence {
                converged,
                requested: m,
            });
        }
        target = limit.min(target + m.max(20));
    }
}

/// Full eigendecomposition of a small dense symmetric matrix, sorted
/// non-increasing. Serves as the reference the iterative solver is tested
/// against; guarded to `n <= 2000`.
pub fn dense_eigen_oracle(mat: &DMatrix<f64>) -> Result<SpectralBasis> {
    let n = mat.nrows();
    if n != mat.ncols() {
        return Err(Error::DimensionMismatch {
            context: format!("dense eigen oracle needs a square matrix, got {} x {}", n, mat.ncols()),
        });
    }
    if n > DENSE_ORACLE_LIMIT {
        return Err(Error::SizeGuard {
            n,
            limit: DENSE_ORACLE_LIMIT,
        });
    }
    let mut max_abs = 0.0f64;
    let mut max_asym = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            max_abs = max_abs.max(mat[(i, j)].abs());
            max_asym = max_asym.max((mat[(i, j)] - mat[(j, i)]).abs());
        }
    }
    if max_asym > 1e-10 * max_abs.max(1.0) {
        return Err(Error::InvalidParameter(
            "dense eigen oracle needs a symmetric matrix".into(),
        ));
    }

    let eig = nalgebra::SymmetricEigen::new(mat.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for &idx in &order {
        values.push(eig.eigenvalues[idx]);
        let mut v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        canonical_sign(&mut v);
        vectors.push(v);
    }
    Ok(SpectralBasis {
        values,
        right: vectors,
        left: None,
    })
}

/// Full SVD of a small dense matrix, sorted non-increasing; the dense
/// counterpart of [`top_svd`]. Guarded to `max(rows, cols) <= 2000`.
pub fn dense_svd_oracle(mat: &DMatrix<f64>) -> Result<SpectralBasis> {
    let r = mat.nrows();
    let c = mat.ncols();
    let n = r.max(c);
    if n > DENSE_ORACLE_LIMIT {
        return Err(Error::SizeGuard {
            n,
            limit: DENSE_ORACLE_LIMIT,
        });
    }
    let svd = nalgebra::SVD::new(mat.clone(), true, true);
    let su = svd.u.as_ref().unwrap();
    let svt = svd.v_t.as_ref().unwrap();
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
    });
    let mut values = Vec::with_capacity(k);
    let mut rights = Vec::with_capacity(k);
    let mut lefts = Vec::with_capacity(k);
    for &idx in &order {
        values.push(svd.singular_values[idx]);
        let mut u: Vec<f64> = su.column(idx).iter().copied().collect();
        let mut v: Vec<f64> = svt.row(idx).iter().copied().collect();
        if canonical_sign(&mut u) {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
        lefts.push(u);
        rights.push(v);
    }
    Ok(SpectralBasis {
        values,
        right: rights,
        left: Some(lefts),
    })
}

/// Principal angles (radians, ascending) between the column spans of two
/// equally sized orthonormal families.
///
/// Small angles come from the sines (singular values of `B - A A^T B`),
/// large ones from the cosines (singular values of `A^T B`); `acos` of a
/// cosine rounded to `f64` cannot resolve angles below about `1e-8`, while
/// the sine route is accurate down to machine precision.
pub fn principal_angles(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<f64> {
    assert_eq!(a.len(), b.len(), "subspace dimensions differ");
    let k = a.len();
    if k == 0 {
        return Vec::new();
    }
    let n = a[0].len();
    let a_mat = DMatrix::from_fn(n, k, |i, j| a[j][i]);
    let b_mat = DMatrix::from_fn(n, k, |i, j| b[j][i]);
    let cross = a_mat.transpose() * &b_mat;

    let mut cosines: Vec<f64> = nalgebra::SVD::new(cross.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    cosines.sort_by(|x, y| y.partial_cmp(x).unwrap());

    let residual = &b_mat - &a_mat * cross;
    let mut sines: Vec<f64> = nalgebra::SVD::new(residual, false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sines.sort_by(|x, y| x.partial_cmp(y).unwrap());

    cosines
        .into_iter()
        .zip(sines)
        .map(|(c, s)| {
            if c * c > 0.5 {
                s.clamp(0.0, 1.0).asin()
            } else {
                c.clamp(-1.0, 1.0).acos()
            }
        })
        .collect()
}

/// Largest principal angle between two subspaces.
pub fn max_principal_angle(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    principal_angles(a, b).last().copied().unwrap_or(0.0)
}
