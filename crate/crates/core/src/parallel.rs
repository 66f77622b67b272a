//! Order-preserving map over restart / branch indices.
//!
//! With the `parallel` feature the work is spread over the rayon pool;
//! results always come back in index order so reductions stay deterministic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map_indexed<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel && n > 1 {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

/// Whether the crate was compiled with the rayon backend.
pub const fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}
