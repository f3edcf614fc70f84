//! Data-parallel inner loops with a sequential fallback.
//!
//! Monte-Carlo trials, sweep points, and sample batches are embarrassingly
//! parallel; with the `parallel` feature (default) they fan out over rayon,
//! without it they run sequentially. Results come back in index order
//! either way, so reductions are deterministic regardless of scheduling.

/// Maps `f` over `0..count`, preserving index order in the output.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

/// Sequential fallback with the same signature.
#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}
