//! Simulation, valuation and optimisation of reinsurance strategies for an
//! insurer whose claims arrive as a dynamic contagion process: a point process
//! whose intensity jumps at its own claims (self-excitation) and at external
//! shocks, and decays exponentially in between.
//!
//! The insurer has exponential utility; the value function splits as
//! `v(t, x, λ) = exp(-η x e^{r(T-t)}) φ(t, λ)`, and everything here revolves
//! around estimating `φ` and minimising it over retention levels.

// `!(x > 0.0)` style guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod contracts;
pub mod error;
pub mod grid;
pub mod mc;
pub mod optimizer;
pub mod problem;
pub mod process;
pub mod quadrature;
pub mod rng;
pub mod roots;
mod table_io;
pub mod valuation;

pub use contracts::{ContractKind, PremiumPrinciple, RetentionContract};
pub use error::{Error, Result};
pub use grid::Grid;
pub use mc::Estimate;
pub use optimizer::{PolicyTable, Region};
pub use problem::Problem;
pub use process::{JumpKind, JumpRecord, MarkDistribution, ModelParams, PathRecord, Scheme, SelfExcitation};
pub use valuation::{PhiTable, Policy, TimeCurve};
