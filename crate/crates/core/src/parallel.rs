//! Deterministic data-parallel aggregation.
//!
//! Work is split into fixed-size chunks whose boundaries depend only on the
//! input length. Chunk partials are merged sequentially in ascending chunk
//! order, so floating-point sums are bit-identical for any worker count.

use rayon::prelude::*;

/// Rows per aggregation chunk. Changing this changes accumulation order.
pub const CHUNK_ROWS: usize = 2048;

/// Runs `f` inside a dedicated rayon pool with `workers` threads.
///
/// `workers == 0` uses rayon's default (one thread per logical core).
pub fn with_workers<R, F>(workers: usize, f: F) -> Result<R, rayon::ThreadPoolBuildError>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()?;
    Ok(pool.install(f))
}

/// Map each chunk of `items` into a zeroed accumulator of length `width`,
/// then merge the partials in chunk order.
pub fn ordered_chunk_sum<T, F>(items: &[T], width: usize, accumulate: F) -> Vec<f64>
where
    T: Sync,
    F: Fn(&[T], &mut [f64]) + Sync,
{
    let partials: Vec<Vec<f64>> = items
        .par_chunks(CHUNK_ROWS)
        .map(|chunk| {
            let mut acc = vec![0.0; width];
            accumulate(chunk, &mut acc);
            acc
        })
        .collect();

    let mut total = vec![0.0; width];
    for partial in &partials {
        for (t, p) in total.iter_mut().zip(partial) {
            *t += p;
        }
    }
    total
}
