//! Insurance and reinsurance premium rates.
//!
//! All principles here are linear in the current intensity: the insurer
//! collects `c = λ c̄` and pays the reinsurer `q(u) = λ d(u)`, where `c̄` and
//! `d` depend only on the claim law, the loadings and the control.

use std::fmt;

use crate::error::{config, Result};
use crate::process::MarkDistribution;

use super::retention::RetentionContract;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PremiumPrinciple {
    /// Expected value principle: loadings proportional to expected losses.
    ExpectedValue { theta_i: f64, theta_r: f64 },
    /// Variance principle: pure premium plus a loading on the second moment.
    Variance { eta_i: f64, eta_r: f64 },
    /// Mean-variance principle with constant loadings.
    MeanVariance {
        theta_i: f64,
        eta_i: f64,
        theta_r: f64,
        eta_r: f64,
    },
}

impl PremiumPrinciple {
    pub fn validate(&self) -> Result<()> {
        let loadings: &[(&str, f64)] = match self {
            Self::ExpectedValue { theta_i, theta_r } => &[("theta_i", *theta_i), ("theta_r", *theta_r)],
            Self::Variance { eta_i, eta_r } => &[("eta_i", *eta_i), ("eta_r", *eta_r)],
            Self::MeanVariance {
                theta_i,
                eta_i,
                theta_r,
                eta_r,
            } => &[
                ("theta_i", *theta_i),
                ("eta_i", *eta_i),
                ("theta_r", *theta_r),
                ("eta_r", *eta_r),
            ],
        };
        for (name, v) in loadings {
            if !(v.is_finite() && *v >= 0.0) {
                return config(format!("premium.{name} = {v} must be finite and >= 0"));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::ExpectedValue { .. } => "evp",
            Self::Variance { .. } => "vpp",
            Self::MeanVariance { .. } => "mvp",
        }
    }

    pub fn is_expected_value(&self) -> bool {
        matches!(self, Self::ExpectedValue { .. })
    }

    /// `c̄`: insurance premium per unit of intensity.
    pub fn insurance_unit_rate(&self, claims: &MarkDistribution) -> f64 {
        let (m1, m2) = (claims.mean(), claims.second_moment());
        match *self {
            Self::ExpectedValue { theta_i, .. } => (1.0 + theta_i) * m1,
            Self::Variance { eta_i, .. } => m1 + eta_i * m2,
            Self::MeanVariance { theta_i, eta_i, .. } => (1.0 + theta_i) * m1 + eta_i * m2,
        }
    }

    /// `c = λ c̄`.
    pub fn insurance_rate(&self, claims: &MarkDistribution, lam: f64) -> f64 {
        lam * self.insurance_unit_rate(claims)
    }

    /// `d(u)`: reinsurance premium per unit of intensity.
    pub fn reinsurance_unit_rate(&self, contract: &RetentionContract, claims: &MarkDistribution, u: f64) -> f64 {
        let m1 = || contract.ceded_moment_unchecked(claims, u, 1);
        let m2 = || contract.ceded_moment_unchecked(claims, u, 2);
        match *self {
            Self::ExpectedValue { theta_r, .. } => (1.0 + theta_r) * m1(),
            Self::Variance { eta_r, .. } => m1() + eta_r * m2(),
            Self::MeanVariance { theta_r, eta_r, .. } => (1.0 + theta_r) * m1() + eta_r * m2(),
        }
    }

    /// `d'(u)`.
    pub fn reinsurance_unit_rate_deriv(&self, contract: &RetentionContract, claims: &MarkDistribution, u: f64) -> f64 {
        let m1 = || contract.ceded_moment_deriv_unchecked(claims, u, 1);
        let m2 = || contract.ceded_moment_deriv_unchecked(claims, u, 2);
        match *self {
            Self::ExpectedValue { theta_r, .. } => (1.0 + theta_r) * m1(),
            Self::Variance { eta_r, .. } => m1() + eta_r * m2(),
            Self::MeanVariance { theta_r, eta_r, .. } => (1.0 + theta_r) * m1() + eta_r * m2(),
        }
    }

    /// `q(u) = λ d(u)`. Zero at null reinsurance.
    pub fn reinsurance_rate(
        &self,
        contract: &RetentionContract,
        claims: &MarkDistribution,
        lam: f64,
        u: f64,
    ) -> Result<f64> {
        contract.ceded_moments(claims, u, 1)?;
        Ok(lam * self.reinsurance_unit_rate(contract, claims, u))
    }

    /// `∂q/∂u = λ d'(u)`.
    pub fn reinsurance_rate_deriv(
        &self,
        contract: &RetentionContract,
        claims: &MarkDistribution,
        lam: f64,
        u: f64,
    ) -> Result<f64> {
        contract.ceded_moments(claims, u, 1)?;
        Ok(lam * self.reinsurance_unit_rate_deriv(contract, claims, u))
    }
}

impl fmt::Display for PremiumPrinciple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::ExpectedValue { theta_i, theta_r } => write!(f, "evp(theta_i={theta_i}, theta_r={theta_r})"),
            Self::Variance { eta_i, eta_r } => write!(f, "vpp(eta_i={eta_i}, eta_r={eta_r})"),
            Self::MeanVariance {
                theta_i,
                eta_i,
                theta_r,
                eta_r,
            } => {
                write!(
                    f,
                    "mvp(theta_i={theta_i}, eta_i={eta_i}, theta_r={theta_r}, eta_r={eta_r})"
                )
            }
        }
    }
}
