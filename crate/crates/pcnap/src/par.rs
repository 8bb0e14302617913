//! Data-parallel helpers with a sequential fallback.
//!
//! With the default `parallel` feature the hot enumeration loops (family
//! construction, brute-force search) fan out via rayon; without it the same
//! entry points run sequentially. Results are order-normalized by the
//! callers, so both paths produce identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..total` and collect the `Some` results in index order.
pub(crate) fn map_masks<T, F>(total: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..total).into_par_iter().filter_map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..total).filter_map(f).collect()
    }
}

/// Map `f` over `items`, preserving order.
pub(crate) fn map_vec<I, T, F>(items: Vec<I>, f: F) -> Vec<T>
where
    I: Send,
    T: Send,
    F: Fn(I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}
