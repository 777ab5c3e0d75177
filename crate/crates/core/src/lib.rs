//! Studentized U-statistic type processes for testing a single change in
//! distribution, with Monte Carlo critical values from their Gaussian limits.

pub mod detector;
pub mod dist;
pub mod error;
pub mod kernels;
pub mod limitsim;
pub mod parallel;
pub mod quad;
pub mod rng;
pub mod uprocess;
pub mod weights;

pub use error::{Error, Result};
