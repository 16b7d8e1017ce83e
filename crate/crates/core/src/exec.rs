//! Sequential / parallel execution switch.
//!
//! Without the `parallel` feature, [`Execution::Parallel`] silently runs the
//! sequential path.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Map `f` over `items`, preserving order.
    pub fn map<'a, T, R, F>(self, items: &'a [T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&'a T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }

    /// Index of the minimum key; ties go to the lowest index.
    pub fn argmin_by_key<T, K, F>(self, items: &[T], key: F) -> Option<(usize, K)>
    where
        T: Sync,
        K: Ord + Send,
        F: Fn(&T) -> K + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => items
                .par_iter()
                .enumerate()
                .map(|(i, item)| (key(item), i))
                .min()
                .map(|(k, i)| (i, k)),
            _ => items
                .iter()
                .enumerate()
                .map(|(i, item)| (key(item), i))
                .min()
                .map(|(k, i)| (i, k)),
        }
    }
}
