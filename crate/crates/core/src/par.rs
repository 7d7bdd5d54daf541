//! Execution policy for the data-parallel sweeps.
//!
//! With the `parallel` feature (default) the `Parallel` policy fans work out over
//! the rayon pool; without it every policy runs sequentially. Results are always
//! collected in input order, so output never depends on the policy.

/// How a sweep is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Whether this policy actually runs on the rayon pool in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Map `f` over `items`, preserving order.
pub fn map<T, R, F>(exec: Execution, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.into_par_iter().map(f).collect();
    }
    let _ = exec;
    items.into_iter().map(f).collect()
}

/// Accumulate a histogram over `0..n` in chunks and add the chunk histograms.
///
/// `f(i, hist)` adds the contribution of index `i` to `hist`.
pub fn histogram<F>(exec: Execution, n: u64, bins: usize, f: F) -> Vec<i64>
where
    F: Fn(u64, &mut [i64]) + Sync + Send,
{
    const CHUNK: u64 = 1 << 12;
    let run = |lo: u64, hi: u64| {
        let mut h = vec![0i64; bins];
        for i in lo..hi {
            f(i, &mut h);
        }
        h
    };
    if !exec.is_parallel() || n <= CHUNK {
        return run(0, n);
    }
    let chunks: Vec<(u64, u64)> = (0..n)
        .step_by(CHUNK as usize)
        .map(|lo| (lo, (lo + CHUNK).min(n)))
        .collect();
    let parts = map(exec, chunks, |(lo, hi)| run(lo, hi));
    let mut total = vec![0i64; bins];
    for part in parts {
        for (t, v) in total.iter_mut().zip(part) {
            *t += v;
        }
    }
    total
}
