//! Geometry of subspace projection matrices and Monte-Carlo
//! restricted-isometry experiments under random compression.
//!
//! The set P_{N,s} of orthogonal projectors onto s-dimensional subspaces
//! of R^N is an s(N-s)-dimensional submanifold of R^{NxN}. This crate
//! provides:
//!
//! * [`matops`] -- the dense linear-algebra substrate with pinned
//!   tolerances (QR orthonormalization, symmetric eigendecomposition,
//!   Frobenius norms);
//! * [`grassmann`] -- Haar sampling of subspaces, projection matrices,
//!   the projection distance, and the P_{2,1} circle characterization;
//! * [`geometry`] -- tangent/normal projections at a base point, the
//!   numerical dimension count, and the reach witness/probe showing the
//!   manifold's condition number is sqrt(2);
//! * [`compression`] -- random orthoprojector and Gaussian measurement
//!   operators over the vectorized ambient space, with binary
//!   persistence;
//! * [`rip`] -- chord sampling, isometry-ratio statistics, minimal-m
//!   search, scaling-law fits against s(N-s) log N, and Grassmannian
//!   packing estimates.
//!
//! All randomness flows through explicit `u64` seeds (see [`seed`]);
//! Monte-Carlo loops run data-parallel under the default `parallel`
//! feature and sequentially without it, with identical results.

pub mod compression;
pub mod error;
pub mod geometry;
pub mod grassmann;
pub mod matops;
mod parallel;
pub mod rip;
pub mod seed;

pub use error::{Error, Result};
pub use matops::{Matrix, Vector};
