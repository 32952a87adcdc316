//! Valuation of fixed strategies: the reduced value function `φ(t, λ)`,
//! terminal wealth, and closed-form oracles for degenerate models.

pub mod estimators;
pub mod functional;
pub mod measure_change;
pub mod phi_table;
pub mod policy;

pub use estimators::{
    estimate_phi, estimate_phi_lower_bound, estimate_phi_q, estimate_phi_table, estimate_phi_with,
    phi_closed_form_poisson, phi_deterministic_intensity, value_function,
};
pub use functional::{terminal_wealth, PathTotals};
pub use measure_change::MeasureChange;
pub use phi_table::PhiTable;
pub use policy::{Policy, TimeCurve};
