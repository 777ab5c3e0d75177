//! Holds the `acceptance` test target, which runs the full verification
//! suite of `ucpd` and prints one PASS/FAIL line per criterion:
//!
//! ```text
//! cargo test -p ucpd-validation --test acceptance
//! ```
