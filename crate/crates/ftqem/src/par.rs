//! Chunked parallel map with a result order that does not depend on the
//! worker count.

use rayon::prelude::*;

/// Splits `0..total` into chunks of `chunk` items and maps each chunk
/// `[start, end)` in parallel. Results come back in chunk order.
pub fn map_chunks<T, F>(total: u64, chunk: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync,
{
    let chunk = chunk.max(1);
    let n = total.div_ceil(chunk);
    (0..n)
        .into_par_iter()
        .map(|c| f(c * chunk, ((c + 1) * chunk).min(total)))
        .collect()
}
