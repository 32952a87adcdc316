use thiserror::Error;

/// Errors produced by the simulation, valuation and optimization routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data violates a structural invariant (ordering, shape).
    #[error("structural error: {0}")]
    Structural(String),

    /// Invalid model, contract or premium configuration.
    #[error("config error: {0}")]
    Config(String),

    /// A numerical procedure failed to converge or produced a non-finite value.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The requested combination is outside what the method supports.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The first-order condition has a sign pattern that is impossible under concavity.
    #[error("concavity violation at t={t}, lambda={lambda}: h(u_M)={h_min} < 0 and h(u_N)={h_max} > 0")]
    ConcavityViolation {
        t: f64,
        lambda: f64,
        h_min: f64,
        h_max: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

#[allow(dead_code)]
pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}
