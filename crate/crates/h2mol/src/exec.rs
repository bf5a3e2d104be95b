//! Execution shim: data-parallel map with a sequential fallback.
//!
//! Sweeps over gamma grids, R grids, and oracle meshes are independent point
//! evaluations, so the parallel story is a single `par_map`. With the
//! `parallel` feature (default) it fans out over rayon's global pool; without
//! it the identical call sites run sequentially. `seq_map` is always
//! sequential so benches can compare both paths in one binary.

/// Maps `f` over `items`, in parallel when the `parallel` feature is active.
#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Maps `f` over `items` sequentially (fallback build).
#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Always-sequential map with the same signature, for comparison benches.
pub fn seq_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}
