//! Data-parallel helpers.
//!
//! Every hot loop in the crate (restarts, sweep grid points, Pauli-word sums)
//! goes through [`map_indexed`], which fans out over rayon when the `parallel`
//! feature is enabled and the caller asks for [`Execution::Parallel`]. Results
//! are always returned in index order so reductions are reproducible
//! regardless of thread count.

/// How an indexed batch of independent work items is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
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

/// Evaluates `f(0), f(1), ..., f(len - 1)` and returns the results in order.
pub fn map_indexed<T, F>(len: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..len).into_par_iter().map(f).collect()
        }
        _ => (0..len).map(f).collect(),
    }
}

/// Number of items worth evaluating together under `exec`.
pub fn worker_count(exec: Execution) -> usize {
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => rayon::current_num_threads().max(1),
        _ => 1,
    }
}

/// Pairwise (tree) summation; bounds round-off growth to O(log n).
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        len => {
            let (lo, hi) = values.split_at(len / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}
