//! Points of the Grassmannian Gr_{N,s} and of the projection-matrix
//! manifold P_{N,s}.
//!
//! A subspace is represented by an orthonormal basis matrix X (N x s); its
//! projection matrix P_X = X X^T is a symmetric idempotent point of the
//! s(N-s)-dimensional submanifold P_{N,s} of R^{NxN}. For N = 2, s = 1 the
//! manifold is a circle of radius 1/sqrt(2) centered at I/2, which gives a
//! closed-form check used throughout the test suite.

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matops::{self, Matrix, TOL_EIG, TOL_ORTHO, TOL_SYM};
use crate::seed;

/// An s-dimensional subspace of R^N, stored as an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    n: usize,
    s: usize,
    basis: Matrix,
}

impl Subspace {
    /// Wraps an orthonormal N x s basis; proper subspaces only (1 <= s < N).
    pub fn from_basis(basis: Matrix) -> Result<Self> {
        let (n, s) = basis.shape();
        check_dims(n, s)?;
        matops::ensure_finite(&basis, "Subspace::from_basis")?;
        let gram_err = (basis.transpose() * &basis - Matrix::identity(s, s)).norm();
        if gram_err > TOL_ORTHO {
            return Err(Error::BadDimensions(format!(
                "basis not orthonormal: ||X^T X - I||_F = {gram_err:.3e}"
            )));
        }
        Ok(Self { n, s, basis })
    }

    /// Orthonormalizes an arbitrary full-rank N x s matrix first.
    pub fn from_spanning(a: &Matrix) -> Result<Self> {
        let (n, s) = a.shape();
        check_dims(n, s)?;
        Self::from_basis(matops::qr_orthonormalize(a)?)
    }

    /// Span of the given canonical coordinate axes (0-based indices).
    pub fn coordinate(n: usize, axes: &[usize]) -> Result<Self> {
        check_dims(n, axes.len())?;
        let mut basis = Matrix::zeros(n, axes.len());
        for (j, &i) in axes.iter().enumerate() {
            if i >= n {
                return Err(Error::BadDimensions(format!("axis {i} out of range for N={n}")));
            }
            basis[(i, j)] = 1.0;
        }
        Self::from_basis(basis)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.s
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }
}

fn check_dims(n: usize, s: usize) -> Result<()> {
    if s == 0 || s >= n {
        Err(Error::BadDimensions(format!("need 1 <= s < N, got N={n}, s={s}")))
    } else {
        Ok(())
    }
}

/// The projection matrix P_X = X X^T of a subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix {
    n: usize,
    s: usize,
    mat: Matrix,
}

impl ProjectionMatrix {
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// Rank of the projector (= subspace dimension).
    pub fn rank(&self) -> usize {
        self.s
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    /// Runs the full invariant suite: symmetry, idempotence, trace = s,
    /// eigenvalues in {0,1}, and ||P||_F = sqrt(s).
    ///
    /// Construction via [`projection_matrix`] guarantees these hold; this
    /// is the explicit check used by tests and `verify-geometry`.
    pub fn validate(&self) -> Result<()> {
        let p = &self.mat;
        let s = self.s as f64;
        let sym_err = (p - p.transpose()).norm();
        if sym_err > TOL_SYM * s.sqrt() {
            return Err(Error::NotSymmetric(sym_err));
        }
        let idem_err = (p * p - p).norm();
        if idem_err > TOL_EIG {
            return Err(Error::BadDimensions(format!("not idempotent: {idem_err:.3e}")));
        }
        let trace_err = (p.trace() - s).abs();
        if trace_err > TOL_EIG {
            return Err(Error::BadDimensions(format!("trace off rank: {trace_err:.3e}")));
        }
        let norm_err = (p.norm() - s.sqrt()).abs();
        if norm_err > TOL_EIG {
            return Err(Error::BadDimensions(format!("||P||_F off sqrt(s): {norm_err:.3e}")));
        }
        let (w, _) = matops::sym_eig(p)?;
        for (i, &lambda) in w.iter().enumerate() {
            let target = if i < self.s { 1.0 } else { 0.0 };
            if (lambda - target).abs() > TOL_EIG {
                return Err(Error::BadDimensions(format!(
                    "eigenvalue {i} = {lambda:.12} not in {{0,1}}"
                )));
            }
        }
        Ok(())
    }
}

/// Haar-uniform random subspace: QR orthonormalization of an N x s matrix
/// of i.i.d. standard normal draws. Same seed, same basis.
pub fn sample_uniform_subspace(n: usize, s: usize, seed_v: u64) -> Result<Subspace> {
    check_dims(n, s)?;
    let mut rng = seed::rng(seed_v);
    // Column-major fill order is part of the reproducibility contract.
    let g = Matrix::from_fn(n, s, |_, _| StandardNormal.sample(&mut rng));
    Subspace::from_basis(matops::qr_orthonormalize(&g)?)
}

/// P_X = basis * basis^T (valid because the stored basis is orthonormal).
pub fn projection_matrix(sub: &Subspace) -> ProjectionMatrix {
    ProjectionMatrix {
        n: sub.n,
        s: sub.s,
        mat: sub.basis() * sub.basis().transpose(),
    }
}

/// Orthonormal basis X_perp of the complement, so that [X, X_perp] is an
/// orthogonal N x N matrix.
///
/// Computed from the eigenvectors of I - P_X for the eigenvalue-1
/// eigenspace; the unit spectral gap makes this accurate to solver
/// precision, and the result is deterministic for a fixed basis.
pub fn orthonormal_complement(sub: &Subspace) -> Result<Matrix> {
    let n = sub.n;
    let p = projection_matrix(sub);
    let complement = Matrix::identity(n, n) - p.matrix();
    let (w, v) = matops::sym_eig(&complement)?;
    let k = n - sub.s;
    debug_assert!(w[k - 1] > 0.5 && (k == n || w[k] < 0.5));
    Ok(v.columns(0, k).into_owned())
}

/// Projection distance d_p(X, Y) = sqrt(||P_X - P_Y||_F^2 / 2), in
/// [0, sqrt(min(s, N-s))].
pub fn projection_distance(p: &ProjectionMatrix, q: &ProjectionMatrix) -> Result<f64> {
    if p.n != q.n || p.s != q.s {
        return Err(Error::ShapeMismatch(format!(
            "projection_distance over (N={}, s={}) vs (N={}, s={})",
            p.n, p.s, q.n, q.s
        )));
    }
    Ok(((p.matrix() - q.matrix()).norm_squared() / 2.0).sqrt())
}

/// Distance of a P_{2,1} point from the circle center I/2; always
/// 1/sqrt(2), the circle radius.
pub fn circle_characterization_check(p: &ProjectionMatrix) -> Result<f64> {
    if p.n != 2 || p.s != 1 {
        return Err(Error::BadDimensions(format!(
            "circle characterization needs N=2, s=1, got N={}, s={}",
            p.n, p.s
        )));
    }
    Ok((p.matrix() - Matrix::identity(2, 2).scale(0.5)).norm())
}
