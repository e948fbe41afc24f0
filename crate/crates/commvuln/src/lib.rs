//! File formats, bundled fixtures, JSON reports and the experiment runner
//! on top of `commvuln-core`.

pub mod experiment;
pub mod fixtures;
pub mod io;
pub mod report;

pub use commvuln_core as core;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "COMMVULN_THREADS";

/// Sizes the global rayon pool from `COMMVULN_THREADS` when it is set.
/// Returns the configured count, or `None` when unset or already built.
pub fn init_threads() -> Result<Option<usize>, String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    match rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
        Ok(()) => Ok(Some(n)),
        Err(_) => Ok(None),
    }
}
