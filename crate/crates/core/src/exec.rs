//! Worker-pool control.
//!
//! Parallel maps always place results by index, so the output never depends on
//! the worker count or on scheduling.

use std::sync::Arc;

use rayon::prelude::*;

#[derive(Clone, Default)]
pub struct Exec {
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl std::fmt::Debug for Exec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Exec").field("threads", &self.threads()).finish()
    }
}

impl Exec {
    /// Runs everything on the calling thread.
    pub fn serial() -> Self {
        Exec { pool: None }
    }

    /// Uses a dedicated pool of `threads` workers; `threads <= 1` is serial.
    pub fn with_threads(threads: usize) -> Self {
        if threads <= 1 {
            return Self::serial();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("failed to build worker pool");
        Exec { pool: Some(Arc::new(pool)) }
    }

    pub fn threads(&self) -> usize {
        self.pool.as_ref().map_or(1, |p| p.current_num_threads())
    }

    /// Maps `f` over `0..len`, returning results in index order.
    pub fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match &self.pool {
            None => (0..len).map(f).collect(),
            Some(pool) => pool.install(|| (0..len).into_par_iter().map(f).collect()),
        }
    }

    /// Like [`Exec::map`] but stops at the first error (lowest index wins).
    pub fn try_map<T, E, F>(&self, len: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        match &self.pool {
            None => (0..len).map(f).collect(),
            Some(pool) => pool.install(|| {
                let results: Vec<Result<T, E>> = (0..len).into_par_iter().map(f).collect();
                results.into_iter().collect()
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_preserves_order() {
        let serial = Exec::serial().map(100, |i| i * i);
        let parallel = Exec::with_threads(3).map(100, |i| i * i);
        assert_eq!(serial, parallel);
    }
}
