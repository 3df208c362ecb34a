//! Execution-mode switch: data-parallel map with a sequential fallback.
//!
//! Heavy sweeps (grid SDP solves, multi-start optimizer restarts, batches of
//! random realizations) run through [`par_map`], which dispatches either to
//! rayon's work-stealing pool or to a plain sequential loop.  Results are
//! collected in input order in both modes, so a computation whose per-item
//! work is deterministic yields identical output regardless of mode.

/// How a bulk computation should be executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    /// Plain in-order loop on the calling thread.
    Sequential,
    /// Work-stealing thread pool (requires the `parallel` feature; falls
    /// back to sequential when compiled without it).
    Parallel,
}

impl ExecMode {
    /// Parallel when the `parallel` feature is compiled in, else sequential.
    pub fn auto() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Map `f` over `items`, honouring `mode`.  Output order matches input
/// order in both modes.
pub fn par_map<T, U, F>(mode: ExecMode, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items.into_iter().map(f).collect(),
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                items.into_par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                items.into_iter().map(f).collect()
            }
        }
    }
}

/// Configure the global thread-pool size.  A `jobs` of 0 leaves the
/// default (one worker per logical CPU).  Returns an error message if the
/// pool was already initialised with a different size; callers may ignore
/// it (the pool still works, just with the earlier size).
pub fn configure_jobs(jobs: usize) -> Result<(), String> {
    if jobs == 0 {
        return Ok(());
    }
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| e.to_string())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_preserve_order() {
        let items: Vec<u64> = (0..100).collect();
        let seq = par_map(ExecMode::Sequential, items.clone(), |x| x * x);
        let par = par_map(ExecMode::Parallel, items, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[7], 49);
    }
}
