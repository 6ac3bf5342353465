//! Pluggable data parallelism.
//!
//! The core crate has no threads. Heavy loops (all-pairs routing, per-step
//! efficiency recomputation, distance matrices) are written as indexed maps
//! over an [`Executor`]; the companion crate supplies a thread-pool backed
//! implementation. Results are always returned in index order, so output is
//! identical whichever executor runs it.

use alloc::vec::Vec;

pub trait Executor: Sync {
    /// Evaluates `f(0), f(1), .., f(n - 1)` and returns the results in order.
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs everything on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

impl<E: Executor + ?Sized> Executor for &E {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (**self).map(n, f)
    }
}
