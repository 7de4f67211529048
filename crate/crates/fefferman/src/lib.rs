//! Verification suites over `fefferman-core` and the reports they produce.

pub mod cli;
pub mod config;
pub mod report;
pub mod suites;

use std::fmt;

pub use config::{Format, SuiteConfig, Tolerances};
pub use report::{Entry, Report, Section};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Anything that stops a suite before it can produce a verdict.
#[derive(Debug)]
pub struct SuiteError(pub String);

impl fmt::Display for SuiteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SuiteError {}

macro_rules! suite_error_from {
    ($($t:ty),*) => {$(
        impl From<$t> for SuiteError {
            fn from(e: $t) -> Self {
                SuiteError(e.to_string())
            }
        }
    )*};
}

suite_error_from!(
    fefferman_core::lie::LieError,
    fefferman_core::inclusions::InclusionError,
    fefferman_core::conformal::ConformalError,
    fefferman_core::jet::JetError,
    std::io::Error,
    String
);

pub type SuiteResult<T> = Result<T, SuiteError>;
