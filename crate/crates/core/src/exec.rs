//! Sequential / data-parallel execution of independent jobs.
//!
//! Results are always assembled in input order, so both modes produce
//! identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How independent jobs (sweep cells, scaling points, time chunks) are run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Rayon work-stealing over the global pool. Falls back to sequential when
    /// the crate is built without the `parallel` feature.
    #[default]
    Parallel,
}

impl Exec {
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Exec::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
            #[cfg(not(feature = "parallel"))]
            Exec::Parallel => items.iter().map(f).collect(),
        }
    }

    /// True when jobs actually run concurrently.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Caps the global thread pool. Must run before the first parallel job; later
/// calls are ignored.
pub fn configure_threads(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_keep_order() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = Exec::Sequential.map(&items, |x| x * x + 1);
        let par = Exec::Parallel.map(&items, |x| x * x + 1);
        assert_eq!(seq, par);
        assert_eq!(seq[999], 999 * 999 + 1);
    }
}
