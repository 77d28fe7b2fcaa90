//! Execution strategy for data-parallel loops.
//!
//! Heavy per-source loops (shortest-path sweeps, probe aggregation) run either
//! sequentially or on a rayon pool. Results are combined in a fixed chunk
//! order so both strategies produce bitwise-identical floats.

/// How to execute a data-parallel loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is on; otherwise falls
    /// back to sequential execution.
    Parallel,
}

impl Default for Strategy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Strategy::Parallel
        } else {
            Strategy::Sequential
        }
    }
}

/// Number of sources combined into one partial. Chunks are reduced in index
/// order regardless of which worker produced them, keeping float accumulation
/// deterministic.
pub const CHUNK: usize = 64;

/// Applies `f` to every index in `0..n`, preserving order.
pub fn map_indexed<T, F>(n: usize, strategy: Strategy, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match strategy {
        Strategy::Sequential => (0..n).map(f).collect(),
        Strategy::Parallel => map_parallel(n, f),
    }
}

/// Sums per-source contribution vectors of length `len` over sources
/// `0..n_sources`. `f(source, acc)` adds one source's contribution into `acc`.
///
/// Sources are grouped into [`CHUNK`]-sized chunks; each chunk accumulates
/// sequentially, and chunk partials are added in chunk order. The result is
/// bitwise-identical across strategies and run-to-run.
pub fn sum_chunked<F>(n_sources: usize, len: usize, strategy: Strategy, f: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    let chunk_totals = |range: std::ops::Range<usize>| -> Vec<f64> {
        let mut acc = vec![0.0; len];
        for s in range {
            f(s, &mut acc);
        }
        acc
    };
    let n_chunks = n_sources.div_ceil(CHUNK);
    let partials: Vec<Vec<f64>> = map_indexed(n_chunks, strategy, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n_sources);
        chunk_totals(lo..hi)
    });
    let mut total = vec![0.0; len];
    for part in partials {
        for (t, p) in total.iter_mut().zip(&part) {
            *t += p;
        }
    }
    total
}

#[cfg(feature = "parallel")]
fn map_parallel<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    // into_par_iter over a range preserves index order in collect.
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_parallel<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}
