//! Order-preserving parallel helpers.
//!
//! Results are always collected in index order so reductions performed on the
//! returned vectors are independent of scheduling.

/// Environment variable that caps the number of worker threads.
pub const THREADS_ENV: &str = "BOLTZKIT_THREADS";

/// Evaluate `f(i)` for `i in 0..n`, possibly in parallel, returning results in order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Read [`THREADS_ENV`] and size the global pool accordingly.
///
/// Returns the thread cap that was applied, if any. Calling this more than once
/// is harmless; only the first successful initialisation takes effect.
pub fn init_threads_from_env() -> Option<usize> {
    let n = std::env::var(THREADS_ENV).ok()?.trim().parse::<usize>().ok()?;
    if n == 0 {
        return None;
    }
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Some(n)
}
