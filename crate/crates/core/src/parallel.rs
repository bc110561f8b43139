//! Worker-count control. Every parallel routine in the crate runs on the
//! current rayon pool and produces results independent of its size.

/// Runs `f` on a dedicated pool of `workers` threads; `0` uses rayon's default.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
