//! Data-parallel batch helpers with a sequential fallback.

/// How a batch of independent jobs is executed.
///
/// `Parallel` uses the rayon global pool when the crate is built with the
/// `parallel` feature; without it, it runs the same loop as `Sequential`.
/// Results are returned in index order either way, so outputs never depend
/// on the choice.
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
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// `(0..n).map(f).collect()`, possibly across threads.
    pub fn map_indexed<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    pub fn map_slice<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        self.map_indexed(items.len(), |i| f(&items[i]))
    }

    /// Maximum of `f` over `0..n` (NaN-propagating: a NaN anywhere wins).
    pub fn max_indexed<F>(self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        self.map_indexed(n, f)
            .into_iter()
            .fold(f64::NEG_INFINITY, |acc, v| {
                if v.is_nan() || acc.is_nan() {
                    f64::NAN
                } else {
                    acc.max(v)
                }
            })
    }

    /// Minimum of `f` over `0..n`, NaN-propagating.
    pub fn min_indexed<F>(self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        -self.max_indexed(n, |i| -f(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree_and_keep_order() {
        let seq = Execution::Sequential.map_indexed(1000, |i| i * i);
        let par = Execution::Parallel.map_indexed(1000, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[31], 961);
    }

    #[test]
    fn extrema() {
        let v = [3.0, -1.0, 7.5, 2.0];
        assert_eq!(Execution::Parallel.max_indexed(4, |i| v[i]), 7.5);
        assert_eq!(Execution::Sequential.min_indexed(4, |i| v[i]), -1.0);
        assert!(Execution::Sequential
            .max_indexed(2, |i| [1.0, f64::NAN][i])
            .is_nan());
        assert_eq!(
            Execution::Sequential.max_indexed(0, |_| 0.0),
            f64::NEG_INFINITY
        );
    }
}
