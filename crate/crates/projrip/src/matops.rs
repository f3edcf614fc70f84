//! Dense linear-algebra substrate with explicitly contracted numerics.
//!
//! Everything downstream (subspace sampling, tangent projections, chord
//! statistics) goes through the handful of operations here, so their
//! tolerances are pinned as constants and tested once. Factorizations are
//! delegated to nalgebra; this module owns the contracts on top of them:
//! QR with a fixed sign convention, symmetric eigendecomposition with
//! descending eigenvalues, and Frobenius norms/inner products.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dense double-precision matrix used throughout the crate.
pub type Matrix = DMatrix<f64>;
/// Dense double-precision vector.
pub type Vector = DVector<f64>;

/// Orthonormality tolerance: ||Q^T Q - I||_F for factored bases.
pub const TOL_ORTHO: f64 = 1e-10;
/// Numerical-rank threshold on R diagonal magnitudes.
pub const TOL_RANK: f64 = 1e-10;
/// Relative symmetry tolerance: ||S - S^T||_F <= TOL_SYM * ||S||_F.
pub const TOL_SYM: f64 = 1e-12;
/// Eigenvalue/idempotence tolerance for projection-matrix identities.
pub const TOL_EIG: f64 = 1e-9;

/// Checks all entries are finite; `what` names the operation for the error.
pub fn ensure_finite(a: &Matrix, what: &'static str) -> Result<()> {
    if a.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Thin QR orthonormalization of a full-column-rank N x s matrix.
///
/// Returns Q with Q^T Q = I_s and span(Q) = span(A). The sign convention
/// fixes the R diagonal nonnegative, so identical inputs give bit-identical
/// bases across runs. Fails with `RankDeficient` when the smallest R
/// diagonal magnitude drops below [`TOL_RANK`].
pub fn qr_orthonormalize(a: &Matrix) -> Result<Matrix> {
    let (n, s) = a.shape();
    if s == 0 || s > n {
        return Err(Error::BadDimensions(format!(
            "qr_orthonormalize needs 1 <= cols <= rows, got {n}x{s}"
        )));
    }
    ensure_finite(a, "qr_orthonormalize")?;
    let qr = a.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    let mut min_diag = f64::INFINITY;
    for j in 0..s {
        let d = r[(j, j)];
        min_diag = min_diag.min(d.abs());
        if d < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if min_diag < TOL_RANK {
        return Err(Error::RankDeficient(min_diag));
    }
    Ok(q)
}

/// Symmetric eigendecomposition S = V diag(w) V^T with w descending.
///
/// Ties keep the solver's output order after the descending sort; callers
/// must not depend on the eigenvector choice within an eigenspace.
pub fn sym_eig(s: &Matrix) -> Result<(Vector, Matrix)> {
    let (n, m) = s.shape();
    if n != m {
        return Err(Error::ShapeMismatch(format!("sym_eig needs square, got {n}x{m}")));
    }
    ensure_finite(s, "sym_eig")?;
    let asym = (s - s.transpose()).norm();
    if asym > TOL_SYM * s.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric(asym));
    }
    // Work on the symmetrized matrix so the factorization sees an exactly
    // symmetric input even when S carries rounding at the TOL_SYM level.
    let sym = (s + s.transpose()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or_else(|| Error::NoConvergence("symmetric eigensolver".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let values = Vector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Frobenius norm sqrt(sum a_ij^2).
pub fn frobenius_norm(a: &Matrix) -> f64 {
    a.norm()
}

/// Frobenius inner product sum a_ij b_ij.
pub fn frobenius_inner(a: &Matrix, b: &Matrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "frobenius_inner on {}x{} vs {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(a.dot(b))
}

/// Symmetric part (M + M^T) / 2.
pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()).scale(0.5)
}

/// Matrix of i.i.d. standard normal draws in column-major fill order,
/// determined by the seed.
pub fn gaussian_matrix(rows: usize, cols: usize, seed_v: u64) -> Matrix {
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = crate::seed::rng(seed_v);
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng))
}
