//! Comparison of strategies with and without self-excitation, and the
//! monotonicity-in-λ precondition that the comparison relies on.

pub mod comparison;
pub mod monotonicity;

pub use comparison::{compare_policies, compare_with_cox, ComparisonReport, ComparisonRow, Precondition};
pub use monotonicity::{
    coupled_monotonicity, monotonicity_probe, strana_check, MonotonicityProbe, MonotonicityReport, StranaReport,
};
