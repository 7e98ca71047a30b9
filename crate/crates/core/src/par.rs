//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) [`Execution::Parallel`] runs on the
//! rayon global pool. Without it every mode runs sequentially, so results are
//! identical either way; only wall time changes.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Whether this build can actually run in parallel.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Applies `f` to every item, preserving order.
pub fn map<T, R, F>(mode: Execution, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    match mode {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
        _ => items.into_iter().map(f).collect(),
    }
}

/// Applies `f` to every element in place.
pub fn for_each_mut<T, F>(mode: Execution, items: &mut [T], f: F)
where
    T: Send,
    F: Fn(&mut T) + Send + Sync,
{
    match mode {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter_mut().for_each(f)
        }
        _ => items.iter_mut().for_each(f),
    }
}

/// Sum of `f` over `items`.
pub fn sum_by<T, F>(mode: Execution, items: &[T], f: F) -> u64
where
    T: Sync,
    F: Fn(&T) -> u64 + Send + Sync,
{
    match mode {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).sum()
        }
        _ => items.iter().map(f).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let input: Vec<u64> = (0..1000).collect();
        let a = map(Execution::Parallel, input.clone(), |x| x * x);
        let b = map(Execution::Sequential, input.clone(), |x| x * x);
        assert_eq!(a, b);
        assert_eq!(
            sum_by(Execution::Parallel, &input, |x| *x),
            sum_by(Execution::Sequential, &input, |x| *x)
        );
        let mut v = input.clone();
        for_each_mut(Execution::Parallel, &mut v, |x| *x += 1);
        assert_eq!(v[999], 1000);
    }
}
