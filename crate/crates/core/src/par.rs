//! Data-parallel helpers. With the `parallel` feature disabled every entry
//! point runs sequentially and [`Exec::Parallel`] is accepted as a no-op.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

pub(crate) fn map_collect<T, R, F>(items: &[T], exec: Exec, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

pub(crate) fn sum_chunks<F>(range: Range<u64>, chunk: u64, exec: Exec, f: F) -> u64
where
    F: Fn(Range<u64>) -> u64 + Sync + Send,
{
    let starts: Vec<u64> = (range.start..range.end).step_by(chunk.max(1) as usize).collect();
    let end = range.end;
    let part = |&s: &u64| f(s..(s + chunk).min(end));
    map_collect(&starts, exec, part).into_iter().sum()
}

/// Runs `f` on a pool of `workers` threads. `workers == 1` forces the
/// sequential path regardless of the feature set.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce(Exec) -> R + Send) -> R {
    if workers <= 1 {
        return f(Exec::Sequential);
    }
    #[cfg(feature = "parallel")]
    {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            return pool.install(|| f(Exec::Parallel));
        }
    }
    f(Exec::Parallel)
}
