//! First-order differential structure and condition number of P_{N,s}.
//!
//! At a base point P_X the tangent space is
//!
//! ```text
//! T_{P_X} = { X_perp K X^T + X K^T X_perp^T : K in R^{(N-s) x s} }
//! ```
//!
//! and the normal space is its Frobenius-orthogonal complement in R^{NxN}.
//! The module provides the tangent/normal projectors, a numerical dimension
//! count (= s(N-s)), the exact self-intersection witness of the normal
//! bundle at radius 1/sqrt(2), and a randomized probe confirming that no
//! closer self-intersection shows up: the manifold's reach is 1/sqrt(2),
//! i.e. its condition number is sqrt(2).

use crate::error::{Error, Result};
use crate::grassmann::{
    orthonormal_complement, projection_matrix, sample_uniform_subspace, ProjectionMatrix, Subspace,
};
use crate::matops::{self, Matrix, Vector, TOL_RANK};
use crate::parallel::map_indexed;
use crate::seed;

/// Membership slack for the normal-space test, relative to max(1, ||M||_F).
pub const NORMAL_MEMBERSHIP_TOL: f64 = 1e-9;
/// Relative Gram-eigenvalue cutoff when orthonormalizing merged tangent frames.
const GRAM_RANK_REL_TOL: f64 = 1e-10;
/// Random pairs closer than this are resampled in the reach probe; the
/// merged tangent frames of near-identical subspaces are numerically
/// rank-deficient and carry no information about the reach.
const PROBE_MIN_PAIR_DISTANCE: f64 = 1e-3;
const PROBE_MAX_RESAMPLES: usize = 100;

/// A tangent element of P_{N,s} at a base point, parameterized by its
/// (N-s) x s coefficient matrix K.
#[derive(Debug, Clone)]
pub struct TangentVector {
    base: Subspace,
    complement: Matrix,
    coeff: Matrix,
    ambient: Matrix,
}

impl TangentVector {
    pub fn base(&self) -> &Subspace {
        &self.base
    }

    /// The cached orthonormal complement X_perp of the base point.
    pub fn complement(&self) -> &Matrix {
        &self.complement
    }

    pub fn coeff(&self) -> &Matrix {
        &self.coeff
    }

    /// The ambient N x N representative X_perp K X^T + X K^T X_perp^T.
    pub fn ambient(&self) -> &Matrix {
        &self.ambient
    }
}

fn lift_ambient(basis: &Matrix, complement: &Matrix, coeff: &Matrix) -> Matrix {
    let half = complement * coeff * basis.transpose();
    &half + half.transpose()
}

/// Lifts a coefficient matrix K to its ambient tangent representative.
/// The lift doubles energy: ||ambient||_F = sqrt(2) ||K||_F.
pub fn tangent_lift(sub: &Subspace, coeff: &Matrix) -> Result<TangentVector> {
    let (n, s) = (sub.ambient_dim(), sub.dim());
    if coeff.shape() != (n - s, s) {
        return Err(Error::ShapeMismatch(format!(
            "tangent coefficient must be {}x{}, got {}x{}",
            n - s,
            s,
            coeff.nrows(),
            coeff.ncols()
        )));
    }
    matops::ensure_finite(coeff, "tangent_lift")?;
    let complement = orthonormal_complement(sub)?;
    let ambient = lift_ambient(sub.basis(), &complement, coeff);
    Ok(TangentVector {
        base: sub.clone(),
        complement,
        coeff: coeff.clone(),
        ambient,
    })
}

/// Frobenius-orthogonal projection of an arbitrary N x N matrix onto the
/// tangent space at P_X. Closed form: K = X_perp^T sym(M) X.
pub fn project_to_tangent(sub: &Subspace, m: &Matrix) -> Result<TangentVector> {
    let n = sub.ambient_dim();
    if m.shape() != (n, n) {
        return Err(Error::ShapeMismatch(format!(
            "expected {}x{} matrix, got {}x{}",
            n,
            n,
            m.nrows(),
            m.ncols()
        )));
    }
    matops::ensure_finite(m, "project_to_tangent")?;
    let complement = orthonormal_complement(sub)?;
    let sym = matops::symmetrize(m);
    let coeff = complement.transpose() * sym * sub.basis();
    let ambient = lift_ambient(sub.basis(), &complement, &coeff);
    Ok(TangentVector {
        base: sub.clone(),
        complement,
        coeff,
        ambient,
    })
}

/// Normal component M minus its tangent part; tangent-projects to zero.
pub fn project_to_normal(sub: &Subspace, m: &Matrix) -> Result<Matrix> {
    let tangent = project_to_tangent(sub, m)?;
    Ok(m - tangent.ambient())
}

/// True iff M lies in the orthogonal complement of the tangent space at
/// P_X, within [`NORMAL_MEMBERSHIP_TOL`] relative slack.
pub fn normal_membership_check(sub: &Subspace, m: &Matrix) -> Result<bool> {
    let tangent = project_to_tangent(sub, m)?;
    Ok(tangent.coeff().norm() <= NORMAL_MEMBERSHIP_TOL * m.norm().max(1.0))
}

/// Numerical dimension of the tangent space: rank of the span of the lifts
/// of all canonical coefficient matrices E_ab. Equals s(N-s).
pub fn tangent_dimension(sub: &Subspace) -> Result<usize> {
    let complement = orthonormal_complement(sub)?;
    let lifts = tangent_frame(sub.basis(), &complement);
    let gram = lifts.transpose() * &lifts;
    let (eigenvalues, _) = matops::sym_eig(&gram)?;
    let scale = eigenvalues[0].max(0.0).sqrt().max(1.0);
    Ok(eigenvalues
        .iter()
        .filter(|&&lambda| lambda.max(0.0).sqrt() > TOL_RANK * scale)
        .count())
}

/// Columns are the vectorized lifts of the canonical E_ab, a fixed
/// spanning frame of the tangent space at the base point.
fn tangent_frame(basis: &Matrix, complement: &Matrix) -> Matrix {
    let n = basis.nrows();
    let s = basis.ncols();
    let d = s * (n - s);
    let mut frame = Matrix::zeros(n * n, d);
    let mut col = 0;
    for b in 0..s {
        for a in 0..(n - s) {
            // lift(E_ab) = xp_a x_b^T + x_b xp_a^T, built as rank-2 update
            let outer = complement.column(a) * basis.column(b).transpose();
            let lift = &outer + outer.transpose();
            frame.set_column(col, &Vector::from_column_slice(lift.as_slice()));
            col += 1;
        }
    }
    frame
}

/// Exact self-intersection witness of the normal bundle at radius
/// 1/sqrt(2): two canonical coordinate spans differing in a single axis
/// and the symmetric matrix Phi equidistant from both projectors, lying in
/// the normal space of each.
#[derive(Debug, Clone)]
pub struct ReachWitness {
    pub x: Subspace,
    pub y: Subspace,
    pub px: ProjectionMatrix,
    pub py: ProjectionMatrix,
    pub phi: Matrix,
    pub dist_x: f64,
    pub dist_y: f64,
}

/// Builds the witness for given dimensions: X = span(e_1..e_s),
/// Y = span(e_1..e_{s-1}, e_{s+1}), Phi diagonal with s-1 ones, two
/// entries 1/2, and zeros. Both distances are exactly 1/sqrt(2).
pub fn reach_witness(n: usize, s: usize) -> Result<ReachWitness> {
    if n < 2 || s == 0 || s >= n {
        return Err(Error::BadDimensions(format!(
            "reach witness needs N >= 2 and 1 <= s < N, got N={n}, s={s}"
        )));
    }
    let x_axes: Vec<usize> = (0..s).collect();
    let mut y_axes = x_axes.clone();
    y_axes[s - 1] = s; // swap the last axis for the next one
    let x = Subspace::coordinate(n, &x_axes)?;
    let y = Subspace::coordinate(n, &y_axes)?;
    let mut diag = Vector::zeros(n);
    for i in 0..s - 1 {
        diag[i] = 1.0;
    }
    diag[s - 1] = 0.5;
    diag[s] = 0.5;
    let phi = Matrix::from_diagonal(&diag);
    let px = projection_matrix(&x);
    let py = projection_matrix(&y);
    let dist_x = (&phi - px.matrix()).norm();
    let dist_y = (&phi - py.matrix()).norm();
    Ok(ReachWitness {
        x,
        y,
        px,
        py,
        phi,
        dist_x,
        dist_y,
    })
}

/// Smallest max-distance from a point of the intersection of the two
/// normal spaces to the two base projectors.
///
/// The constraint set V = N_{P_X} ∩ N_{P_Y} ∩ sym(N) is a linear
/// subspace, so minimizing f(Phi) = max(||Phi - P_X||_F, ||Phi - P_Y||_F)
/// is convex and its optimum has the form Phi = Pi_V(t P_X + (1-t) P_Y)
/// for some t in [0, 1]. Along that segment both squared distances are
/// quadratics in t with equal curvature, so the minimum is found exactly
/// among the quadratic vertices, the single crossing point, and the
/// endpoints. No iteration is involved.
pub fn reach_probe_pair(x: &Subspace, y: &Subspace) -> Result<f64> {
    let n = x.ambient_dim();
    let s = x.dim();
    if y.ambient_dim() != n || y.dim() != s {
        return Err(Error::ShapeMismatch(format!(
            "probe pair over (N={}, s={}) vs (N={}, s={})",
            n,
            s,
            y.ambient_dim(),
            y.dim()
        )));
    }
    let x_perp = orthonormal_complement(x)?;
    let y_perp = orthonormal_complement(y)?;

    // Orthonormal basis of W = T_X + T_Y from the merged lift frames,
    // via the Gram eigendecomposition with a relative rank cutoff.
    let d = s * (n - s);
    let frame_x = tangent_frame(x.basis(), &x_perp);
    let frame_y = tangent_frame(y.basis(), &y_perp);
    let mut merged = Matrix::zeros(n * n, 2 * d);
    for j in 0..d {
        merged.set_column(j, &frame_x.column(j));
        merged.set_column(d + j, &frame_y.column(j));
    }
    let gram = merged.transpose() * &merged;
    let (lambda, vectors) = matops::sym_eig(&gram)?;
    let cutoff = GRAM_RANK_REL_TOL * lambda[0].max(1.0);
    let rank = lambda.iter().take_while(|&&l| l > cutoff).count();
    let mut basis = Matrix::zeros(n * n, rank);
    for k in 0..rank {
        let col = (&merged * vectors.column(k)) / lambda[k].sqrt();
        basis.set_column(k, &col);
    }

    // Project both projectors onto V = sym(N) ∩ W^perp (they are
    // symmetric, so only the W component needs removing).
    let px = Vector::from_column_slice(projection_matrix(x).matrix().as_slice());
    let py = Vector::from_column_slice(projection_matrix(y).matrix().as_slice());
    let project = |v: &Vector| -> Vector { v - &basis * (basis.transpose() * v) };
    let phi_x = project(&px);
    let phi_y = project(&py);

    // Squared distances along Phi(t) = t phi_x + (1-t) phi_y:
    // q_x(t) = a t^2 + bx t + cx, q_y(t) = a t^2 + by t + cy.
    let delta = &phi_x - &phi_y;
    let a = delta.norm_squared();
    let rx = &phi_y - &px;
    let ry = &phi_y - &py;
    let (bx, cx) = (2.0 * delta.dot(&rx), rx.norm_squared());
    let (by, cy) = (2.0 * delta.dot(&ry), ry.norm_squared());

    let mut candidates = vec![0.0, 1.0];
    if a > 0.0 {
        candidates.push((-bx / (2.0 * a)).clamp(0.0, 1.0));
        candidates.push((-by / (2.0 * a)).clamp(0.0, 1.0));
    }
    if bx != by {
        let crossing = (cy - cx) / (bx - by);
        if crossing.is_finite() {
            candidates.push(crossing.clamp(0.0, 1.0));
        }
    }
    let mut best = f64::INFINITY;
    for t in candidates {
        let qx = a * t * t + bx * t + cx;
        let qy = a * t * t + by * t + cy;
        best = best.min(qx.max(qy));
    }
    if !best.is_finite() {
        return Err(Error::NoConvergence("reach probe produced non-finite value".into()));
    }
    Ok(best.max(0.0).sqrt())
}

/// Minimum of [`reach_probe_pair`] over `trials` independent Haar pairs.
/// Never drops below 1/sqrt(2) up to numerical slack: the normal bundle
/// self-intersects no closer than the witness radius.
///
/// Trials run in parallel with per-trial derived seeds; failed trials are
/// skipped and only poison the result if every trial fails.
pub fn reach_probe(n: usize, s: usize, trials: usize, seed_v: u64) -> Result<f64> {
    if n > 8 {
        return Err(Error::BadDimensions(format!("reach probe limited to N <= 8, got N={n}")));
    }
    if s == 0 || s >= n {
        return Err(Error::BadDimensions(format!("need 1 <= s < N, got N={n}, s={s}")));
    }
    if trials == 0 {
        return Err(Error::BadDimensions("need trials >= 1".into()));
    }
    let outcomes = map_indexed(trials, |t| probe_trial(n, s, seed::derive(seed_v, t as u64)));
    let mut best = f64::INFINITY;
    let mut completed = 0usize;
    for value in outcomes.into_iter().flatten() {
        best = best.min(value);
        completed += 1;
    }
    if completed == 0 {
        return Err(Error::NoConvergence("all reach-probe trials failed".into()));
    }
    Ok(best)
}

fn probe_trial(n: usize, s: usize, trial_seed: u64) -> Result<f64> {
    for attempt in 0..PROBE_MAX_RESAMPLES {
        let x = sample_uniform_subspace(n, s, seed::derive(trial_seed, 2 * attempt as u64))?;
        let y = sample_uniform_subspace(n, s, seed::derive(trial_seed, 2 * attempt as u64 + 1))?;
        let gap = (projection_matrix(&x).matrix() - projection_matrix(&y).matrix()).norm();
        if gap < PROBE_MIN_PAIR_DISTANCE {
            continue;
        }
        return reach_probe_pair(&x, &y);
    }
    Err(Error::DegeneratePair(PROBE_MAX_RESAMPLES))
}
