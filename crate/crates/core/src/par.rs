//! Trial-level data parallelism.
//!
//! With the `parallel` feature (default) independent trials run on the rayon
//! pool that is current at the call site; without it, or with
//! [`Execution::Sequential`], they run in index order on the calling thread.
//! Results are always returned in trial order, so any reduction done by the
//! caller is schedule-independent.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run trials concurrently.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map_trials<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_trials_with(Execution::default(), n, f)
}

pub fn map_trials_with<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if exec.is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Number of indices in `0..n` for which `f` holds.
pub fn count_trials<F>(n: usize, f: F) -> u64
where
    F: Fn(usize) -> bool + Sync + Send,
{
    count_trials_with(Execution::default(), n, f)
}

pub fn count_trials_with<F>(exec: Execution, n: usize, f: F) -> u64
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if exec.is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().filter(|&i| f(i)).count() as u64;
        }
    }
    let _ = exec;
    (0..n).filter(|&i| f(i)).count() as u64
}

/// Runs `op` on a dedicated pool of `threads` workers (sequentially when the
/// `parallel` feature is off).
pub fn with_threads<R: Send>(threads: usize, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .expect("failed to build thread pool");
        pool.install(op)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        op()
    }
}
