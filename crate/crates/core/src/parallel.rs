//! Deterministic parallelism helpers.
//!
//! Every parallel loop in this crate partitions its work into chunks of a
//! *fixed* size and combines the per-chunk results in index order. The chunk
//! size never depends on the worker count, so results are identical whether
//! a computation runs on 1 or 64 threads: bit-identical in exact mode, and
//! reproducible run-to-run in float mode (the reduction tree is fixed).

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Fixed work-partition size for range sums. Changing this constant changes
/// float-mode results (it reshapes the reduction tree), so it is part of the
/// reproducibility contract.
pub const CHUNK: u64 = 1 << 13;

/// Run `f` on a dedicated pool of `workers` threads, or on the global pool
/// when `workers` is `None`.
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidParam("worker count must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParam(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Sum `body(lo, hi)` over the half-open range `[start, end)`, split into
/// fixed `CHUNK`-sized pieces evaluated in parallel and folded in index
/// order. `body` must compute its piece sequentially.
pub fn chunked_sum<T, F>(start: u64, end: u64, zero: T, body: F) -> T
where
    T: Send + std::ops::AddAssign,
    F: Fn(u64, u64) -> T + Sync,
{
    if start >= end {
        return zero;
    }
    let n_chunks = (end - start).div_ceil(CHUNK);
    let partials: Vec<T> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = start + c * CHUNK;
            let hi = (lo + CHUNK).min(end);
            body(lo, hi)
        })
        .collect();
    let mut acc = zero;
    for p in partials {
        acc += p;
    }
    acc
}

/// Parallel map over `items` preserving input order in the output.
pub fn ordered_map<I, O, F>(items: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
{
    items.par_iter().map(f).collect()
}
