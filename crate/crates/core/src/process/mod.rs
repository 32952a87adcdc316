//! The dynamic contagion claim process: parameters, paths, closed-form
//! intensity functionals, simulation and diagnostics.

pub mod diagnostics;
pub mod intensity;
pub mod marks;
pub mod params;
pub mod path;
pub mod simulate;

pub use diagnostics::{
    dynkin_check, ks_exponential, pooled_time_change_increments, time_change_increments, DynkinReport, KsResult,
};
pub use intensity::{
    compensator_between, decay, intensity_at, intensity_at_from, log_density_ratio, mean_claim_count_from,
    mean_intensity, mean_intensity_from,
};
pub use marks::{MarkDistribution, SelfExcitation};
pub use params::ModelParams;
pub use path::{fmt17, JumpKind, JumpRecord, PathRecord, Segment};
pub use simulate::{simulate, simulate_exact, simulate_into, simulate_thinning, Scheme};
