//! Library half of the verification harness: the suite configuration, the
//! per-identity runners, and the machine-readable report type consumed by
//! the `ppav` binary and the acceptance tests.

pub mod suite;

pub use suite::{run_suite, SuiteConfig, SuiteError, VerificationReport, ALL_IDENTITIES};
