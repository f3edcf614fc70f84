//! Monte-Carlo verification of the restricted isometry property of
//! P_{N,s} under random compression.
//!
//! For a random orthoprojector A with m rows the isometry ratio
//!
//! ```text
//! r(Z) = ||A(Z)||_2 / ||Z||_F,   Z = P_X - P_Y,
//! ```
//!
//! concentrates around sqrt(m)/N, and m = O(s(N-s) log N) measurements
//! keep the worst-case deviation below a target epsilon. This module
//! samples unit chords of the manifold, aggregates normalized ratios,
//! searches for the smallest m meeting an epsilon target, fits measured
//! m against s(N-s) log N across a dimension grid, and estimates packing
//! numbers of the underlying Grassmannian in projection distance.
//!
//! The sampled deviation is a lower bound of the supremum over the whole
//! chord set; results record trial counts and are never presented as the
//! exact RIP constant.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::compression::{apply, random_orthoprojector, CompressionOperator, OperatorKind};
use crate::error::{Error, Result};
use crate::grassmann::{projection_matrix, sample_uniform_subspace, Subspace};
use crate::matops::Matrix;
use crate::parallel::map_indexed;
use crate::seed;

/// Chords closer than this are resampled (numerically coincident pair).
const CHORD_MIN_SEPARATION: f64 = 1e-8;
const CHORD_MAX_RESAMPLES: usize = 100;
/// Operators drawn per candidate m in the minimal-m search; all must pass.
const SEARCH_OPERATORS: u64 = 5;

/// A unit-Frobenius normalized difference of two projection matrices.
#[derive(Debug, Clone)]
pub struct Chord {
    diff: Matrix,
    x_seed: u64,
    y_seed: u64,
}

impl Chord {
    /// The normalized difference (P_X - P_Y) / ||P_X - P_Y||_F.
    pub fn diff(&self) -> &Matrix {
        &self.diff
    }

    /// Seeds of the two source subspaces.
    pub fn source_seeds(&self) -> (u64, u64) {
        (self.x_seed, self.y_seed)
    }
}

/// Draws a chord from two independent Haar subspaces, resampling the pair
/// while the projectors coincide numerically.
pub fn sample_chord(n: usize, s: usize, seed_v: u64) -> Result<Chord> {
    for attempt in 0..CHORD_MAX_RESAMPLES as u64 {
        let x_seed = seed::derive(seed_v, 2 * attempt);
        let y_seed = seed::derive(seed_v, 2 * attempt + 1);
        let x = sample_uniform_subspace(n, s, x_seed)?;
        let y = sample_uniform_subspace(n, s, y_seed)?;
        let diff = projection_matrix(&x).matrix() - projection_matrix(&y).matrix();
        let norm = diff.norm();
        if norm < CHORD_MIN_SEPARATION {
            continue;
        }
        return Ok(Chord {
            diff: diff / norm,
            x_seed,
            y_seed,
        });
    }
    Err(Error::DegeneratePair(CHORD_MAX_RESAMPLES))
}

/// Ratio statistics of one Monte-Carlo isometry experiment. Ratios are
/// normalized by sqrt(m)/N, so perfect concentration means ratio 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RipEstimate {
    pub n: usize,
    pub s: usize,
    pub m: usize,
    pub trials: usize,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_mean: f64,
    /// max(1 - ratio_min, ratio_max - 1): the sampled (lower-bound)
    /// deviation, not the uniform RIP constant.
    pub eps_hat: f64,
    pub operator_kind: OperatorKind,
    pub operator_seed: u64,
    pub chord_seed: u64,
    /// Per-trial normalized ratios in trial order.
    pub ratios: Vec<f64>,
}

/// Samples `trials` chords and aggregates normalized isometry ratios for
/// a fixed operator. Trials run in parallel on derived seeds and are
/// reduced in trial order, so a seed fully determines the output.
pub fn rip_estimate(
    op: &CompressionOperator,
    s: usize,
    trials: usize,
    seed_v: u64,
) -> Result<RipEstimate> {
    let n = op.ambient_dim();
    if trials == 0 {
        return Err(Error::BadDimensions("need trials >= 1".into()));
    }
    if s == 0 || s >= n {
        return Err(Error::BadDimensions(format!("need 1 <= s < N, got N={n}, s={s}")));
    }
    let m = op.measurements();
    let scale = n as f64 / (m as f64).sqrt();
    let outcomes = map_indexed(trials, |t| -> Result<f64> {
        let chord = sample_chord(n, s, seed::derive(seed_v, t as u64))?;
        Ok(apply(op, chord.diff())?.norm() * scale)
    });
    let mut ratios = Vec::with_capacity(trials);
    for outcome in outcomes {
        ratios.push(outcome?);
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &r in &ratios {
        min = min.min(r);
        max = max.max(r);
        sum += r;
    }
    let mean = sum / trials as f64;
    Ok(RipEstimate {
        n,
        s,
        m,
        trials,
        ratio_min: min,
        ratio_max: max,
        ratio_mean: mean,
        eps_hat: (1.0 - min).max(max - 1.0),
        operator_kind: op.kind(),
        operator_seed: op.seed(),
        chord_seed: seed_v,
        ratios,
    })
}

/// Worst eps_hat over [`SEARCH_OPERATORS`] independent orthoprojectors at
/// a given m. Seeds derive from (seed, m, operator index) only, never
/// from the search path, so repeated queries agree and the pass predicate
/// is monotone in the epsilon target by construction.
fn search_deviation(
    n: usize,
    s: usize,
    m: usize,
    confidence_trials: usize,
    seed_v: u64,
) -> Result<f64> {
    let m_seed = seed::derive(seed_v, m as u64);
    let mut worst = 0.0f64;
    for i in 0..SEARCH_OPERATORS {
        let op = random_orthoprojector(m, n, seed::derive(m_seed, 2 * i))?;
        let estimate = rip_estimate(&op, s, confidence_trials, seed::derive(m_seed, 2 * i + 1))?;
        worst = worst.max(estimate.eps_hat);
    }
    Ok(worst)
}

/// Binary search for the smallest m in [1, N^2 - 1] whose sampled
/// deviation stays within `eps_target` on all of the independent
/// operators. Fails with `Unsatisfiable` when even m = N^2 - 1 misses.
pub fn minimal_m_search(
    n: usize,
    s: usize,
    eps_target: f64,
    confidence_trials: usize,
    seed_v: u64,
) -> Result<usize> {
    if !(eps_target > 0.0 && eps_target < 1.0) {
        return Err(Error::BadDimensions(format!("need 0 < eps < 1, got {eps_target}")));
    }
    if s == 0 || s >= n {
        return Err(Error::BadDimensions(format!("need 1 <= s < N, got N={n}, s={s}")));
    }
    if confidence_trials == 0 {
        return Err(Error::BadDimensions("need confidence_trials >= 1".into()));
    }
    let mut cache: BTreeMap<usize, f64> = BTreeMap::new();
    let mut deviation = |m: usize| -> Result<f64> {
        if let Some(&d) = cache.get(&m) {
            return Ok(d);
        }
        let d = search_deviation(n, s, m, confidence_trials, seed_v)?;
        cache.insert(m, d);
        Ok(d)
    };
    let top = n * n - 1;
    let mut lo = 1usize;
    let mut hi = top;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if deviation(mid)? <= eps_target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    if deviation(lo)? <= eps_target {
        Ok(lo)
    } else {
        Err(Error::Unsatisfiable(top, eps_target))
    }
}

/// One grid point of a scaling sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub s: usize,
    pub eps_target: f64,
    pub m_min: usize,
    /// Regressor s(N-s) ln N.
    pub x: f64,
}

/// Least-squares fit of measured minimal m against s(N-s) ln N.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingFit {
    pub points: Vec<ScalingPoint>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Set when fewer than two distinct regressor values exist.
    pub underdetermined: bool,
    /// Scope note carried into serialized output.
    pub note: String,
}

/// Default sweep grid; avoids s << N exclusively since s(N-s) and sN
/// separate most around s = N/2.
pub const DEFAULT_SCALING_GRID: [(usize, usize); 9] = [
    (8, 1),
    (8, 2),
    (8, 4),
    (12, 1),
    (12, 2),
    (12, 3),
    (12, 6),
    (16, 2),
    (16, 4),
];

/// Runs [`minimal_m_search`] per grid point and fits m_min against
/// s(N-s) ln N. Point seeds derive from the point's position in the grid.
pub fn scaling_experiment(
    grid: &[(usize, usize)],
    eps_target: f64,
    trials: usize,
    seed_v: u64,
) -> Result<ScalingFit> {
    if grid.is_empty() {
        return Err(Error::BadDimensions("empty scaling grid".into()));
    }
    if let Some(&(n, s)) = grid.iter().find(|&&(n, s)| n > 24 || s == 0 || s >= n) {
        return Err(Error::BadDimensions(format!(
            "grid point (N={n}, s={s}) outside 1 <= s < N <= 24"
        )));
    }
    let mut points = Vec::with_capacity(grid.len());
    for (index, &(n, s)) in grid.iter().enumerate() {
        let m_min = minimal_m_search(n, s, eps_target, trials, seed::derive(seed_v, index as u64))?;
        points.push(ScalingPoint {
            n,
            s,
            eps_target,
            m_min,
            x: (s * (n - s)) as f64 * (n as f64).ln(),
        });
    }
    Ok(fit_points(points))
}

fn fit_points(points: Vec<ScalingPoint>) -> ScalingFit {
    let note = "m_min fitted against s(N-s) ln N at fixed eps; \
                the eps dependence inside the logarithm is not separable at this scale"
        .to_string();
    let count = points.len() as f64;
    let mean_x = points.iter().map(|p| p.x).sum::<f64>() / count;
    let mean_y = points.iter().map(|p| p.m_min as f64).sum::<f64>() / count;
    let sxx: f64 = points.iter().map(|p| (p.x - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.x - mean_x) * (p.m_min as f64 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.m_min as f64 - mean_y).powi(2)).sum();
    if points.len() < 2 || sxx == 0.0 {
        return ScalingFit {
            points,
            slope: 0.0,
            intercept: mean_y,
            r_squared: 1.0,
            underdetermined: true,
            note,
        };
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual: f64 = points
        .iter()
        .map(|p| (p.m_min as f64 - (slope * p.x + intercept)).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - residual / syy).clamp(0.0, 1.0) };
    ScalingFit {
        points,
        slope,
        intercept,
        r_squared,
        underdetermined: false,
        note,
    }
}

/// Greedy farthest-point packing of Haar samples at separation `t` in
/// projection distance. The packing cardinality lower-bounds the sampled
/// packing number and, by packing-covering duality, the covering number
/// at half the radius.
pub fn covering_estimate(
    n: usize,
    s: usize,
    t: f64,
    samples: usize,
    seed_v: u64,
) -> Result<usize> {
    if t.is_nan() || t <= 0.0 || !t.is_finite() {
        return Err(Error::BadDimensions(format!("need radius t > 0, got {t}")));
    }
    if n > 8 {
        return Err(Error::BadDimensions(format!("covering limited to N <= 8, got N={n}")));
    }
    if s == 0 || s >= n {
        return Err(Error::BadDimensions(format!("need 1 <= s < N, got N={n}, s={s}")));
    }
    if s * (n - s) > 6 {
        return Err(Error::BadDimensions(format!(
            "covering limited to s(N-s) <= 6, got {}",
            s * (n - s)
        )));
    }
    if samples == 0 {
        return Err(Error::BadDimensions("need samples >= 1".into()));
    }
    let outcomes = map_indexed(samples, |i| {
        sample_uniform_subspace(n, s, seed::derive(seed_v, i as u64))
    });
    let mut bases: Vec<Subspace> = Vec::with_capacity(samples);
    for outcome in outcomes {
        bases.push(outcome?);
    }
    // d_p^2(X, Y) = s - ||X^T Y||_F^2, avoiding the N x N projectors.
    let s_f = s as f64;
    let distance = |a: &Subspace, b: &Subspace| -> f64 {
        let overlap = a.basis().transpose() * b.basis();
        (s_f - overlap.norm_squared()).max(0.0).sqrt()
    };
    let mut chosen = vec![0usize];
    let mut min_dist: Vec<f64> = bases.iter().map(|b| distance(&bases[0], b)).collect();
    loop {
        let mut best = 0usize;
        let mut best_dist = f64::NEG_INFINITY;
        for (i, &d) in min_dist.iter().enumerate() {
            if d > best_dist {
                best_dist = d;
                best = i;
            }
        }
        if best_dist < t {
            break;
        }
        chosen.push(best);
        for (i, d) in min_dist.iter_mut().enumerate() {
            let fresh = distance(&bases[best], &bases[i]);
            if fresh < *d {
                *d = fresh;
            }
        }
    }
    Ok(chosen.len())
}
