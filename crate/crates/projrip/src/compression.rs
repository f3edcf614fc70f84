//! Linear measurement operators A : R^{NxN} -> R^m.
//!
//! Two ensembles: a random orthoprojector (m orthonormal rows drawn
//! uniformly over the N^2-dimensional vectorization) and an i.i.d.
//! Gaussian ensemble with entry variance 1/N^2. Both share the same
//! centering: E ||A(Z)||_2^2 = (m/N^2) ||Z||_F^2, so the isometry ratio
//! ||A(Z)||_2 / ||Z||_F concentrates around sqrt(m)/N for either kind.
//!
//! Vectorization is fixed column-major: entry (i, j) sits at position
//! j*N + i. The measurement rows are stored internally as columns of an
//! N^2 x m matrix, which keeps orthonormalization and application
//! cache-friendly; the on-disk layout is row-major over the logical
//! m x N^2 row block.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matops::{self, Matrix, Vector, TOL_RANK};
use crate::seed;

/// Measurement ensemble of a [`CompressionOperator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    /// m orthonormal rows; non-expansive, ratios bounded by N/sqrt(m).
    Orthoprojector,
    /// i.i.d. N(0, 1/N^2) entries; same centering, unbounded tails.
    Gaussian,
}

impl OperatorKind {
    fn to_byte(self) -> u8 {
        match self {
            OperatorKind::Orthoprojector => 0,
            OperatorKind::Gaussian => 1,
        }
    }

    fn from_byte(b: u8) -> Result<Self> {
        match b {
            0 => Ok(OperatorKind::Orthoprojector),
            1 => Ok(OperatorKind::Gaussian),
            other => Err(Error::BadFile(format!("unknown operator kind byte {other}"))),
        }
    }
}

/// A linear map R^{NxN} -> R^m over the column-major vectorization.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionOperator {
    kind: OperatorKind,
    m: usize,
    n: usize,
    /// N^2 x m; column k holds measurement row k.
    columns: Matrix,
    seed: u64,
}

const MAGIC: &[u8; 8] = b"PRJRIP01";

impl CompressionOperator {
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// Number of measurements m.
    pub fn measurements(&self) -> usize {
        self.m
    }

    /// Ambient dimension N (the operator acts on N x N matrices).
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The logical m x N^2 row block.
    pub fn rows(&self) -> Matrix {
        self.columns.transpose()
    }

    /// Orthonormality of the row block: ||rows rows^T - I_m||_F. Only
    /// meaningful for the orthoprojector kind.
    pub fn row_gram_error(&self) -> f64 {
        let gram = self.columns.transpose() * &self.columns;
        (gram - Matrix::identity(self.m, self.m)).norm()
    }

    /// Writes the operator to a binary file: magic `PRJRIP01`, kind byte,
    /// m and n as u64 little-endian, the seed as 32 bytes (u64
    /// little-endian, zero-padded), then the m x N^2 row block as
    /// row-major IEEE-754 f64 little-endian.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&[self.kind.to_byte()])?;
        w.write_all(&(self.m as u64).to_le_bytes())?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        let mut seed_bytes = [0u8; 32];
        seed_bytes[..8].copy_from_slice(&self.seed.to_le_bytes());
        w.write_all(&seed_bytes)?;
        // column-major over columns == row-major over the row block
        for &x in self.columns.as_slice() {
            w.write_all(&x.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads an operator written by [`CompressionOperator::save`].
    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::BadFile("bad magic".into()));
        }
        let mut byte = [0u8; 1];
        r.read_exact(&mut byte)?;
        let kind = OperatorKind::from_byte(byte[0])?;
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let m = u64::from_le_bytes(word) as usize;
        r.read_exact(&mut word)?;
        let n = u64::from_le_bytes(word) as usize;
        let mut seed_bytes = [0u8; 32];
        r.read_exact(&mut seed_bytes)?;
        if seed_bytes[8..].iter().any(|&b| b != 0) {
            return Err(Error::BadFile("unsupported seed encoding".into()));
        }
        let seed_v = u64::from_le_bytes(seed_bytes[..8].try_into().unwrap());
        if n == 0 || m == 0 {
            return Err(Error::BadFile(format!("degenerate dimensions m={m}, n={n}")));
        }
        if kind == OperatorKind::Orthoprojector && m >= n * n {
            return Err(Error::BadFile(format!("orthoprojector needs m < N^2, got m={m}, N={n}")));
        }
        let d = n * n;
        let mut data = vec![0.0f64; d * m];
        for x in data.iter_mut() {
            r.read_exact(&mut word)?;
            *x = f64::from_le_bytes(word);
            if !x.is_finite() {
                return Err(Error::BadFile("non-finite entry".into()));
            }
        }
        let mut tail = [0u8; 1];
        if r.read(&mut tail)? != 0 {
            return Err(Error::BadFile("trailing bytes".into()));
        }
        Ok(Self {
            kind,
            m,
            n,
            columns: Matrix::from_vec(d, m, data),
            seed: seed_v,
        })
    }
}

/// Column-major stacking of a square matrix: entry (i, j) lands at
/// position j*N + i. Isometric: the l2 norm of the output equals the
/// Frobenius norm of the input.
pub fn vectorize(m: &Matrix) -> Result<Vector> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::ShapeMismatch(format!("vectorize needs square, got {rows}x{cols}")));
    }
    Ok(Vector::from_column_slice(m.as_slice()))
}

/// Uniformly random orthoprojector with m < N^2 orthonormal rows.
///
/// Rows are drawn i.i.d. standard normal (row 0 first, left to right) and
/// orthonormalized in order by modified Gram-Schmidt with one
/// re-orthogonalization pass. Same seed, bit-identical operator.
pub fn random_orthoprojector(m: usize, n: usize, seed_v: u64) -> Result<CompressionOperator> {
    let d = check_operator_dims(m, n)?;
    if m >= d {
        return Err(Error::BadDimensions(format!("orthoprojector needs m < N^2 = {d}, got m={m}")));
    }
    let mut rng = seed::rng(seed_v);
    let mut data = vec![0.0f64; d * m];
    for x in data.iter_mut() {
        *x = StandardNormal.sample(&mut rng);
    }
    for k in 0..m {
        let (done, rest) = data.split_at_mut(k * d);
        let v = &mut rest[..d];
        for _ in 0..2 {
            for j in 0..k {
                let q = &done[j * d..(j + 1) * d];
                let dot: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= dot * qi;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < TOL_RANK {
            return Err(Error::RankDeficient(norm));
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    Ok(CompressionOperator {
        kind: OperatorKind::Orthoprojector,
        m,
        n,
        columns: Matrix::from_vec(d, m, data),
        seed: seed_v,
    })
}

/// Gaussian ensemble with i.i.d. N(0, 1/N^2) entries, drawn in the same
/// row-major order as the orthoprojector.
pub fn random_gaussian(m: usize, n: usize, seed_v: u64) -> Result<CompressionOperator> {
    let d = check_operator_dims(m, n)?;
    let sigma = 1.0 / n as f64;
    let mut rng = seed::rng(seed_v);
    let mut data = vec![0.0f64; d * m];
    for x in data.iter_mut() {
        let g: f64 = StandardNormal.sample(&mut rng);
        *x = sigma * g;
    }
    Ok(CompressionOperator {
        kind: OperatorKind::Gaussian,
        m,
        n,
        columns: Matrix::from_vec(d, m, data),
        seed: seed_v,
    })
}

fn check_operator_dims(m: usize, n: usize) -> Result<usize> {
    if m == 0 || n == 0 {
        return Err(Error::BadDimensions(format!("need m >= 1 and N >= 1, got m={m}, N={n}")));
    }
    Ok(n * n)
}

/// Applies the operator: rows * vectorize(M).
pub fn apply(op: &CompressionOperator, m: &Matrix) -> Result<Vector> {
    if m.shape() != (op.n, op.n) {
        return Err(Error::ShapeMismatch(format!(
            "operator over {0}x{0}, input {1}x{2}",
            op.n,
            m.nrows(),
            m.ncols()
        )));
    }
    matops::ensure_finite(m, "apply")?;
    let v = Vector::from_column_slice(m.as_slice());
    Ok(op.columns.tr_mul(&v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{projection_matrix, sample_uniform_subspace};
    use crate::matops::TOL_ORTHO;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian_matrix(n: usize, seed_v: u64) -> Matrix {
        let mut rng = seed::rng(seed_v);
        Matrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng))
    }

    /// Unit-Frobenius difference of two random projectors.
    fn unit_test_matrix(n: usize, seed_v: u64) -> Matrix {
        let x = sample_uniform_subspace(n, 1, seed::derive(seed_v, 0)).unwrap();
        let y = sample_uniform_subspace(n, 1, seed::derive(seed_v, 1)).unwrap();
        let diff = projection_matrix(&x).matrix() - projection_matrix(&y).matrix();
        let norm = diff.norm();
        diff / norm
    }

    #[test]
    fn vectorize_convention() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let v = vectorize(&m).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 3.0, 2.0, 4.0]);
    }

    #[test]
    fn vectorize_is_isometric() {
        let m = gaussian_matrix(5, 1);
        assert_eq!(vectorize(&m).unwrap().norm(), m.norm());
    }

    #[test]
    fn vectorize_of_transpose_is_permutation() {
        let m = gaussian_matrix(4, 2);
        let v = vectorize(&m).unwrap();
        let vt = vectorize(&m.transpose()).unwrap();
        let mut sorted_v: Vec<f64> = v.as_slice().to_vec();
        let mut sorted_vt: Vec<f64> = vt.as_slice().to_vec();
        sorted_v.sort_by(f64::total_cmp);
        sorted_vt.sort_by(f64::total_cmp);
        assert_eq!(sorted_v, sorted_vt);
    }

    #[test]
    fn vectorize_rejects_rectangular() {
        assert!(matches!(vectorize(&Matrix::zeros(2, 3)), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn orthoprojector_rejects_full_dimension() {
        assert!(matches!(random_orthoprojector(16, 4, 0), Err(Error::BadDimensions(_))));
        assert!(matches!(random_orthoprojector(17, 4, 0), Err(Error::BadDimensions(_))));
    }

    #[test]
    fn orthoprojector_rows_are_orthonormal() {
        let op = random_orthoprojector(7, 3, 5).unwrap();
        assert!(op.row_gram_error() <= TOL_ORTHO);
        let op = random_orthoprojector(24, 5, 6).unwrap();
        assert!(op.row_gram_error() <= TOL_ORTHO);
    }

    #[test]
    fn row_block_matches_column_storage() {
        let op = random_orthoprojector(5, 3, 44).unwrap();
        let rows = op.rows();
        assert_eq!(rows.shape(), (5, 9));
        for k in 0..5 {
            let v = apply(&op, &Matrix::identity(3, 3)).unwrap();
            // row k applied to vec(I) equals the k-th output coordinate
            let direct: f64 = rows.row(k).iter().zip(vectorize(&Matrix::identity(3, 3)).unwrap().iter()).map(|(a, b)| a * b).sum();
            assert!((v[k] - direct).abs() <= 1e-12);
        }
    }

    #[test]
    fn operators_are_deterministic() {
        let a = random_orthoprojector(7, 3, 42).unwrap();
        let b = random_orthoprojector(7, 3, 42).unwrap();
        assert_eq!(a.columns.as_slice(), b.columns.as_slice());
        let c = random_gaussian(7, 3, 42).unwrap();
        let d = random_gaussian(7, 3, 42).unwrap();
        assert_eq!(c.columns.as_slice(), d.columns.as_slice());
    }

    #[test]
    fn apply_is_linear_and_kills_zero() {
        let op = random_orthoprojector(6, 3, 9).unwrap();
        assert_eq!(apply(&op, &Matrix::zeros(3, 3)).unwrap().norm(), 0.0);
        let m1 = gaussian_matrix(3, 10);
        let m2 = gaussian_matrix(3, 11);
        let lhs = apply(&op, &(&m1 * 2.0 + &m2 * -3.5)).unwrap();
        let rhs = apply(&op, &m1).unwrap() * 2.0 + apply(&op, &m2).unwrap() * -3.5;
        assert!((lhs - &rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn apply_rejects_wrong_ambient() {
        let op = random_orthoprojector(6, 3, 9).unwrap();
        assert!(matches!(apply(&op, &Matrix::zeros(4, 4)), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn orthoprojector_is_non_expansive() {
        let op = random_orthoprojector(8, 3, 13).unwrap();
        for i in 0..50 {
            let m = gaussian_matrix(3, seed::derive(800, i));
            let out = apply(&op, &m).unwrap();
            assert!(out.norm() <= m.norm() + 1e-12);
        }
    }

    /// E ||A(Z)||^2 = m/N^2 for fixed unit-Frobenius Z, averaged over
    /// independent operators; checked within 3 standard errors.
    #[test]
    fn orthoprojector_energy_centering() {
        const OPS: usize = 2000;
        let n = 4;
        let m = 5;
        let z = unit_test_matrix(n, 12345);
        let mut values = Vec::with_capacity(OPS);
        for i in 0..OPS {
            let op = random_orthoprojector(m, n, seed::derive(999, i as u64)).unwrap();
            values.push(apply(&op, &z).unwrap().norm_squared());
        }
        let mean: f64 = values.iter().sum::<f64>() / OPS as f64;
        let var: f64 =
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (OPS as f64 - 1.0);
        let standard_error = (var / OPS as f64).sqrt();
        let theory = m as f64 / (n * n) as f64;
        assert!(
            (mean - theory).abs() <= 3.0 * standard_error,
            "mean {mean}, theory {theory}, se {standard_error}"
        );
    }

    /// Per-measurement variance of the Gaussian ensemble: Var A(Z)_i =
    /// ||Z||_F^2 / N^2, estimated over 1e4 independent coordinates.
    #[test]
    fn gaussian_per_measurement_variance() {
        let n = 3;
        let m = 100;
        let z = gaussian_matrix(n, 321);
        let mut values = Vec::with_capacity(10_000);
        for i in 0..100u64 {
            let op = random_gaussian(m, n, seed::derive(555, i)).unwrap();
            values.extend_from_slice(apply(&op, &z).unwrap().as_slice());
        }
        let mean: f64 = values.iter().sum::<f64>() / values.len() as f64;
        let var: f64 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
            / (values.len() as f64 - 1.0);
        let theory = z.norm_squared() / (n * n) as f64;
        assert!((var - theory).abs() <= 0.1 * theory, "var {var}, theory {theory}");
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("op.bin");
        for op in [
            random_orthoprojector(6, 3, 77).unwrap(),
            random_gaussian(4, 2, 78).unwrap(),
        ] {
            op.save(&path).unwrap();
            let back = CompressionOperator::load(&path).unwrap();
            assert_eq!(op.kind(), back.kind());
            assert_eq!(op.measurements(), back.measurements());
            assert_eq!(op.ambient_dim(), back.ambient_dim());
            assert_eq!(op.seed(), back.seed());
            assert_eq!(op.columns.as_slice(), back.columns.as_slice());
        }
    }

    #[test]
    fn load_rejects_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("op.bin");
        let op = random_orthoprojector(5, 3, 80).unwrap();
        op.save(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(CompressionOperator::load(&path), Err(Error::BadFile(_))));

        op.save(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 8);
        std::fs::write(&path, &bytes).unwrap();
        assert!(CompressionOperator::load(&path).is_err());

        op.save(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.push(0);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(CompressionOperator::load(&path), Err(Error::BadFile(_))));
    }
}
