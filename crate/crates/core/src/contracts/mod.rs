//! Reinsurance treaties and premium principles.

pub mod premiums;
pub mod retention;

pub use premiums::PremiumPrinciple;
pub use retention::{ContractKind, RetentionContract};
