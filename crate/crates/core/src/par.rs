//! Data-parallel helpers over amplitude-sized buffers.
//!
//! With the `parallel` feature (default) the work is spread over rayon's
//! pool; without it the same chunking runs on the calling thread. Chunk
//! boundaries are fixed and partial results are combined in chunk order, so
//! both builds produce bit-identical floating point results regardless of
//! thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Number of elements processed per task.
pub const CHUNK: usize = 1 << 12;

/// Fills `out[i] = f(i)` for every index.
pub fn fill_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let body = |(c, chunk): (usize, &mut [T])| {
        let base = c * CHUNK;
        for (k, slot) in chunk.iter_mut().enumerate() {
            *slot = f(base + k);
        }
    };
    #[cfg(feature = "parallel")]
    out.par_chunks_mut(CHUNK).enumerate().for_each(body);
    #[cfg(not(feature = "parallel"))]
    out.chunks_mut(CHUNK).enumerate().for_each(body);
}

/// Applies `f(i, &mut x)` to every element in place.
pub fn for_each_indexed<T, F>(data: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    let body = |(c, chunk): (usize, &mut [T])| {
        let base = c * CHUNK;
        for (k, slot) in chunk.iter_mut().enumerate() {
            f(base + k, slot);
        }
    };
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(CHUNK).enumerate().for_each(body);
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(CHUNK).enumerate().for_each(body);
}

/// Runs `f(offset, chunk)` on each fixed-size chunk and returns the partial
/// results in chunk order.
pub fn map_chunks<T, R, F>(data: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &[T]) -> R + Sync + Send,
{
    let body = |(c, chunk): (usize, &[T])| f(c * CHUNK, chunk);
    #[cfg(feature = "parallel")]
    return data.par_chunks(CHUNK).enumerate().map(body).collect();
    #[cfg(not(feature = "parallel"))]
    return data.chunks(CHUNK).enumerate().map(body).collect();
}

/// Like [`map_chunks`] but over the index range `0..len` without backing data.
pub fn map_index_blocks<R, F>(len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(std::ops::Range<usize>) -> R + Sync + Send,
{
    let blocks = len.div_ceil(CHUNK);
    let body = |b: usize| f(b * CHUNK..((b + 1) * CHUNK).min(len));
    #[cfg(feature = "parallel")]
    return (0..blocks).into_par_iter().map(body).collect();
    #[cfg(not(feature = "parallel"))]
    return (0..blocks).map(body).collect();
}

/// Maps independent work items, preserving input order.
pub fn map_items<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return items.par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return items.iter().map(f).collect();
}

/// Runs `op` with at most `threads` worker threads. `None` uses the global
/// pool. Without the `parallel` feature this just calls `op`.
pub fn with_threads<R: Send>(threads: Option<usize>, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match threads {
            Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build() {
                Ok(pool) => pool.install(op),
                Err(_) => op(),
            },
            None => op(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        op()
    }
}

/// Sums partial results left to right.
pub fn ordered_sum(parts: impl IntoIterator<Item = f64>) -> f64 {
    parts.into_iter().fold(0.0, |acc, x| acc + x)
}
