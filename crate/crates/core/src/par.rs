// Order-independent map/sum over replicate indices; sequential without the
// `parallel` feature (e.g. on wasm32).

#[cfg(feature = "parallel")]
pub(crate) fn sum_over<T, F>(count: u64, f: F) -> T
where
    T: Send + Default + std::ops::Add<Output = T>,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .map(f)
        .reduce(T::default, |a, b| a + b)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn sum_over<T, F>(count: u64, f: F) -> T
where
    T: Default + std::ops::Add<Output = T>,
    F: Fn(u64) -> T,
{
    (0..count).map(f).fold(T::default(), |a, b| a + b)
}

#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, F>(count: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..count).map(f).collect()
}
