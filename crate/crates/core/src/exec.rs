//! Execution policy for independent work items.
//!
//! Work items are identified by index and results always come back in index
//! order, so the choice of policy (and thread count) never changes outputs.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Rayon fan-out. `threads: None` uses the global pool. Without the
    /// `parallel` feature this runs sequentially.
    #[default]
    Parallel,
    ParallelWith {
        threads: usize,
    },
}

impl Exec {
    pub fn from_threads(threads: Option<usize>) -> Self {
        match threads {
            Some(1) => Exec::Sequential,
            Some(t) => Exec::ParallelWith { threads: t.max(1) },
            None => Exec::Parallel,
        }
    }

    /// `(0..count).map(f).collect()` under this policy.
    pub fn map<T, F>(&self, count: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match *self {
            Exec::Sequential => (0..count).map(f).collect(),
            Exec::Parallel => par_map(count, f),
            Exec::ParallelWith { threads } => with_pool(threads, || par_map(count, f)),
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}

#[cfg(feature = "parallel")]
fn with_pool<R: Send>(threads: usize, job: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_pool<R: Send>(_threads: usize, job: impl FnOnce() -> R + Send) -> R {
    job()
}
