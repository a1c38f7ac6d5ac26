//! Batch execution over a shared base. With the `parallel` feature, work is
//! spread over the rayon pool with one prover (and memo table) per worker;
//! without it, everything runs on the calling thread with a single prover.

use crate::base::MaterialBase;
use crate::prover::{Prover, ProverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when built without `parallel`.
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

pub fn map_with_prover<T, R, F>(
    base: &MaterialBase,
    config: ProverConfig,
    exec: Execution,
    items: &[T],
    f: F,
) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&mut Prover<'_>, &T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items
                .par_iter()
                .map_init(|| Prover::new(base, config), |p, item| f(p, item))
                .collect()
        }
        _ => {
            let mut prover = Prover::new(base, config);
            items.iter().map(|item| f(&mut prover, item)).collect()
        }
    }
}

/// Plain data-parallel map.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}
