//! Indexed map with a data-parallel default and a sequential fallback.
//!
//! Every hot loop in this crate is expressed as a pure function of an index.
//! With the `parallel` feature (on by default) the map runs on rayon; without
//! it the same code runs on a plain iterator. Results are collected in index
//! order and any randomness is derived from the index through
//! [`crate::rng::substream`], so output never depends on the worker count.

#[cfg(feature = "parallel")]
pub fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Always-sequential twin of [`indexed_map`], kept for benchmarks.
pub fn indexed_map_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let a = indexed_map(1000, |i| (i as f64).sqrt());
        let b = indexed_map_seq(1000, |i| (i as f64).sqrt());
        assert_eq!(a, b);
    }
}
