//! Sample-index partitioning.
//!
//! Work is split into fixed-size chunks of consecutive sample indices. The
//! chunk boundaries never depend on the worker count and chunk results are
//! folded in index order, so outputs are bit-identical for any `Workers`.
//! Without the `parallel` feature every run is sequential.

use std::ops::Range;

#[cfg(feature = "parallel")]
use crate::error::Error;
use crate::error::Result;

/// Samples per chunk. Part of the reproducibility contract: changing it
/// changes floating-point summation order.
pub const CHUNK: u64 = 1024;

/// Worker-thread budget. `0` means "all available cores".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Workers(usize);

impl Workers {
    pub const fn new(threads: usize) -> Self {
        Workers(threads)
    }

    pub const fn sequential() -> Self {
        Workers(1)
    }

    pub const fn all() -> Self {
        Workers(0)
    }

    pub fn threads(self) -> usize {
        self.0
    }
}

impl Default for Workers {
    fn default() -> Self {
        Workers::all()
    }
}

pub fn chunks(total: u64) -> Vec<Range<u64>> {
    (0..total.div_ceil(CHUNK))
        .map(|c| c * CHUNK..((c + 1) * CHUNK).min(total))
        .collect()
}

/// Runs `job` over every chunk of `0..total` and returns the per-chunk
/// results in chunk order.
pub fn map_chunks<T, F>(workers: Workers, total: u64, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync,
{
    map_ranges(workers, chunks(total), job)
}

pub fn map_ranges<T, F>(workers: Workers, ranges: Vec<Range<u64>>, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    {
        if workers.threads() != 1 && ranges.len() > 1 {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers.threads())
                .build()
                .map_err(|e| Error::Workers(e.to_string()))?;
            return Ok(pool.install(|| ranges.into_par_iter().map(&job).collect()));
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;
    Ok(ranges.into_iter().map(job).collect())
}

/// Map-reduce with an order-preserving sequential fold over chunk results.
pub fn fold_chunks<T, A, F, M>(workers: Workers, total: u64, init: A, job: F, merge: M) -> Result<A>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync,
    M: FnMut(A, T) -> A,
{
    Ok(map_chunks(workers, total, job)?
        .into_iter()
        .fold(init, merge))
}
