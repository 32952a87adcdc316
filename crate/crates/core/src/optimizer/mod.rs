//! Optimal strategies: Cox closed forms, the first-order condition with its
//! three regions, threshold loadings, policy iteration and an HJB residual.

pub mod cox;
pub mod foc;
pub mod hjb;
pub mod iteration;
pub mod table;

pub use cox::cox_optimal;
pub use foc::{solve_foc, thresholds, Control, FnRatio, FocSpec, PhiRatio, TableRatio, ThresholdReport, UnitRatio};
pub use hjb::hjb_residual;
pub use iteration::{cox_table, improve, policy_iteration, IterationOutcome, IterationRecord, IterationSettings};
pub use table::{PolicyTable, Region};
