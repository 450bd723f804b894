//! Data-parallel helpers with a sequential fallback.
//!
//! Everything in this crate that fans out over independent items (secret
//! sweeps, graph batches, grid cells) goes through [`map_collect`]. With the
//! `parallel` feature (default) the work is distributed via rayon; without it
//! the same closure runs sequentially. Results are collected in input order,
//! so callers that fold the output afterwards get schedule-independent,
//! bit-identical results either way. [`map_collect_seq`] is always available
//! for benchmarking the two paths against each other.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving input order in the output.
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Sequential reference implementation of [`map_collect`].
pub fn map_collect_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Map `f` over the integer range `0..n`, preserving order.
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_matches_sequential_order() {
        let items: Vec<u64> = (0..1000).collect();
        let a = map_collect(&items, |x| x * x);
        let b = map_collect_seq(&items, |x| x * x);
        assert_eq!(a, b);
    }
}
