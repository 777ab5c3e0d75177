//! File formats, commands and the verification suite of the `ucpd` tool.

pub mod cache;
pub mod commands;
pub mod error;
pub mod ingest;
pub mod record;
pub mod scenario;
pub mod verify;

pub use error::{CliError, CliResult};
