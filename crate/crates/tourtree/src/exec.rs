//! Execution-mode plumbing: every sweep in the crate can run data-parallel
//! (rayon, behind the `parallel` feature) or sequentially, with identical
//! results. Parallel runs fold fixed-size chunks independently and then
//! reduce the chunk results in index order, so output never depends on the
//! number of worker threads.

/// How a sweep should execute. `Parallel` silently degrades to sequential
/// when the crate is built without the `parallel` feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl ExecMode {
    /// The default mode for this build: parallel when the feature is on.
    pub fn auto() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Map `0..len` through `f`, preserving index order in the output.
pub fn map_indexed<T, F>(mode: ExecMode, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Parallel {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
    }
    let _ = mode;
    (0..len).map(f).collect()
}

/// Fold a `u64` range in chunks: each chunk is folded sequentially with
/// `fold`, chunk results are combined in ascending chunk order with `merge`.
/// Both modes produce the same value for associative-enough merges; more
/// importantly, the reduction order is fixed, so even order-sensitive merges
/// ("keep the first witness") are reproducible across thread counts.
pub fn fold_range_chunked<A, F, M, I>(
    mode: ExecMode,
    range: std::ops::Range<u64>,
    chunk: u64,
    init: I,
    fold: F,
    merge: M,
) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(A, u64) -> A + Sync,
    M: Fn(A, A) -> A,
{
    assert!(chunk > 0);
    let len = range.end.saturating_sub(range.start);
    if len == 0 {
        return init();
    }
    let n_chunks = len.div_ceil(chunk) as usize;
    let chunk_result = |c: usize| {
        let lo = range.start + c as u64 * chunk;
        let hi = (lo + chunk).min(range.end);
        let mut acc = init();
        for x in lo..hi {
            acc = fold(acc, x);
        }
        acc
    };
    let parts = map_indexed(mode, n_chunks, chunk_result);
    let mut parts = parts.into_iter();
    let first = parts.next().expect("at least one chunk");
    parts.fold(first, merge)
}
