use rayon::prelude::*;

use railvuln_core::Executor;

use crate::error::{Error, Result};

/// Bounded worker pool. Results come back in index order, so output does
/// not depend on the number of workers.
pub struct Pool {
    inner: rayon::ThreadPool,
}

impl Pool {
    /// `None` uses every available core.
    pub fn new(workers: Option<usize>) -> Result<Pool> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = workers {
            if n == 0 {
                return Err(Error::Config("workers must be at least 1".into()));
            }
            builder = builder.num_threads(n);
        }
        let inner = builder.build().map_err(|e| Error::Config(format!("worker pool: {e}")))?;
        Ok(Pool { inner })
    }

    pub fn workers(&self) -> usize {
        self.inner.current_num_threads()
    }
}

impl Executor for Pool {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.inner.install(|| (0..n).into_par_iter().map(f).collect())
    }
}
