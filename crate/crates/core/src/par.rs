//! Thin data-parallel shims.
//!
//! Every sweep in this crate maps a function over an input slice and collects
//! results in *input order*, so the parallel and sequential builds produce
//! byte-identical reports.  With the default `parallel` feature the work is
//! distributed by rayon; with `--no-default-features` the same helpers run on
//! the calling thread.  Nothing here may ever depend on completion order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Run `f` inside a dedicated pool of `jobs` worker threads, or on the
/// ambient/global pool when `jobs` is `None`.  The sequential build ignores
/// the hint entirely — which is exactly the fallback contract.
#[cfg(feature = "parallel")]
pub fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match jobs {
        Some(n) if n >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("building a rayon pool")
            .install(f),
        _ => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_jobs<R: Send>(_jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    f()
}

/// `items.map(f).collect()`, preserving input order.
#[cfg(feature = "parallel")]
pub fn map_collect<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.iter().map(f).collect()
}

/// Order-preserving map with a per-worker scratch value (coefficient buffers,
/// mostly) so hot loops do not reallocate per item.
#[cfg(feature = "parallel")]
pub fn map_with_scratch<T: Sync, U: Send, S: Send>(
    items: &[T],
    init: impl Fn() -> S + Sync + Send,
    f: impl Fn(&mut S, &T) -> U + Sync + Send,
) -> Vec<U> {
    items.par_iter().map_init(&init, |s, t| f(s, t)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_with_scratch<T: Sync, U: Send, S: Send>(
    items: &[T],
    init: impl Fn() -> S + Sync + Send,
    f: impl Fn(&mut S, &T) -> U + Sync + Send,
) -> Vec<U> {
    let mut s = init();
    items.iter().map(|t| f(&mut s, t)).collect()
}

/// First `Some` in *input order*.  Work proceeds chunk by chunk so a hit near
/// the front does not wait on the tail; within a chunk all items are
/// evaluated, then the earliest hit wins.  Deterministic regardless of
/// thread count.
pub fn find_first_with_scratch<T: Sync, U: Send, S: Send>(
    items: &[T],
    chunk: usize,
    init: impl Fn() -> S + Sync + Send,
    f: impl Fn(&mut S, &T) -> Option<U> + Sync + Send,
) -> Option<U> {
    let chunk = chunk.max(1);
    for block in items.chunks(chunk) {
        let hits = map_with_scratch(block, &init, &f);
        if let Some(hit) = hits.into_iter().flatten().next() {
            return Some(hit);
        }
    }
    None
}
