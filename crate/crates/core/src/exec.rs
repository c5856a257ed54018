//! Execution policy for embarrassingly parallel work over path indices.
//!
//! Results always come back in index order, so any reduction done by the
//! caller over the returned vector is independent of scheduling.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExecPolicy {
    Sequential,
    /// Rayon worker pool; `threads: None` uses the global pool. Falls back
    /// to sequential execution when the `parallel` feature is disabled.
    Parallel {
        threads: Option<usize>,
    },
}

impl Default for ExecPolicy {
    fn default() -> Self {
        ExecPolicy::Parallel { threads: None }
    }
}

/// Evaluates `f(0), …, f(n − 1)` under the given policy.
pub fn map_indexed<T, F>(n: usize, policy: ExecPolicy, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match policy {
        ExecPolicy::Sequential => (0..n).map(f).collect(),
        ExecPolicy::Parallel { threads } => parallel_map(n, threads, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(n: usize, threads: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let run = || (0..n).into_par_iter().map(&f).collect();
    match threads {
        Some(k) => match rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
        {
            Ok(pool) => pool.install(run),
            Err(_) => (0..n).map(&f).collect(),
        },
        None => run(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(n: usize, _threads: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}
