//! Thread-count control. Output never depends on the count; every parallel
//! loop in this crate collects per-replicate results in index order.

use rayon::ThreadPoolBuilder;

pub const THREADS_ENV: &str = "U_CPD_THREADS";

/// Thread cap from `U_CPD_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

/// Runs `f` on a dedicated pool of `threads` workers (the global pool when `None`).
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        None => f(),
        Some(n) => ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
    }
}
