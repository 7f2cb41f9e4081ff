//! Data-parallel helpers with a sequential fallback.
//!
//! [`Mode::Parallel`] uses rayon when the `parallel` feature is on and
//! silently degrades to [`Mode::Sequential`] otherwise. All helpers preserve
//! index order in their outputs, so results never depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    #[default]
    Parallel,
}

impl Mode {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Mode::Parallel
    }
}

/// `(0..n).map(f).collect()`.
pub fn map<T, F>(mode: Mode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// `(0..n).flat_map(f).collect()`, in index order.
pub fn flat_map<T, F>(mode: Mode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> Vec<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return (0..n).into_par_iter().flat_map_iter(f).collect();
    }
    let _ = mode;
    (0..n).flat_map(f).collect()
}

/// Folds `0..n` into an accumulator. `reduce` must be associative and
/// commutative (max, min, sums, set unions) for the result to be
/// independent of the split.
pub fn fold<A, I, F, R>(mode: Mode, n: usize, identity: I, fold: F, reduce: R) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(A, usize) -> A + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return (0..n)
            .into_par_iter()
            .fold(&identity, &fold)
            .reduce(&identity, &reduce);
    }
    let _ = (mode, &reduce);
    (0..n).fold(identity(), fold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        for mode in [Mode::Sequential, Mode::Parallel] {
            assert_eq!(map(mode, 5, |i| i * i), vec![0, 1, 4, 9, 16]);
            assert_eq!(flat_map(mode, 3, |i| vec![i; i]), vec![1, 2, 2]);
            let m = fold(mode, 1000, || 0usize, |a, i| a.max(i % 97), usize::max);
            assert_eq!(m, 96);
        }
    }
}
