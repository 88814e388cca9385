//! Descriptive statistics, nonparametric tests and the analysis tables built
//! from them.

mod ccdf;
mod ks;
mod mann_whitney;
mod mcnemar;
pub mod report;
mod significance;
mod summary;

pub use ccdf::{bundled_tongue_twisters, ccdf_at, derive_thresholds, Thresholds};
pub use ks::{kolmogorov_q, ks_statistic, ks_two_sample};
pub use mann_whitney::{mann_whitney_exact_p, mann_whitney_u, mann_whitney_u_with, MwuMethod};
pub use mcnemar::{binomial_test, mcnemar, mcnemar_counts, mcnemar_from_counts};
pub use significance::{bonferroni, TestResult, Tier};
pub use summary::{summarize, summarize_with, Spread, SummaryStats};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("empty sample")]
    EmptySample,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("threshold {0} outside [0, 1]")]
    ThresholdOutOfRange(String),
    #[error("comparison count must be at least 1")]
    ZeroComparisons,
}
