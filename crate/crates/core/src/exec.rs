//! Data-parallel execution of independent work items.
//!
//! Sweep rows and finite-difference gradient columns are embarrassingly
//! parallel and bit-deterministic per item, so results are collected in
//! input order and are identical no matter how many workers run them. With
//! the `parallel` feature (default) the parallel mode is backed by rayon;
//! without it both modes run sequentially.

/// How to execute a batch of independent evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    /// One item after another on the calling thread.
    Sequential,
    /// Rayon work-stealing pool (falls back to sequential when the
    /// `parallel` feature is disabled).
    #[default]
    Rayon,
}

impl Parallelism {
    /// Resolve a `--jobs`-style request: `None` or `Some(1)` mean serial.
    pub fn from_jobs(jobs: Option<usize>) -> Parallelism {
        match jobs {
            None | Some(0) | Some(1) => Parallelism::Sequential,
            Some(_) => Parallelism::Rayon,
        }
    }
}

/// Map `f` over `0..n`, returning results in index order.
pub fn par_map_range<U, F>(mode: Parallelism, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == Parallelism::Rayon {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// Map `f` over a slice, returning results in input order.
pub fn par_map<T, U, F>(mode: Parallelism, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    par_map_range(mode, items.len(), |i| f(&items[i]))
}

/// Install a global rayon pool with `threads` workers. Call once, before
/// any parallel work; later calls are ignored (rayon keeps the first pool).
#[cfg(feature = "parallel")]
pub fn configure_thread_pool(threads: usize) {
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

#[cfg(not(feature = "parallel"))]
pub fn configure_thread_pool(_threads: usize) {}
