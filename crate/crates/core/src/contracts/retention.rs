//! Retention functions `Φ(z, u)`: the part of a claim `z` kept by the insurer
//! under control `u`. The reinsurer pays `z - Φ(z, u)`.

use std::fmt;

use crate::error::{config, Error, Result};
use crate::process::MarkDistribution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContractKind {
    /// `Φ = u z`, `u ∈ [0, 1]`.
    Proportional,
    /// `Φ = min(u, z)`, `u ∈ [0, ∞]`.
    ExcessOfLoss,
    /// Excess of loss with fixed coverage `β_M`: the reinsurer pays
    /// `min((z - u)^+, β_M)`, `u ∈ [0, ∞]`.
    LimitedXl { coverage: f64 },
}

/// A one-parameter reinsurance treaty with its control interval `[u_min, u_max]`.
///
/// `u_max` may be `+∞`; computations then use the finite `u_cap`, the top of
/// the claim support, beyond which `Φ(z, u) = z` for every possible claim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetentionContract {
    pub kind: ContractKind,
    pub u_min: f64,
    pub u_max: f64,
    pub u_cap: f64,
}

impl RetentionContract {
    pub fn proportional() -> Self {
        Self {
            kind: ContractKind::Proportional,
            u_min: 0.0,
            u_max: 1.0,
            u_cap: 1.0,
        }
    }

    pub fn excess_of_loss(claims: &MarkDistribution) -> Self {
        Self {
            kind: ContractKind::ExcessOfLoss,
            u_min: 0.0,
            u_max: f64::INFINITY,
            u_cap: claims.integration_max(),
        }
    }

    pub fn limited_xl(coverage: f64, claims: &MarkDistribution) -> Result<Self> {
        if !(coverage > 0.0) || !coverage.is_finite() {
            return config(format!("contract.coverage must be finite and > 0, got {coverage}"));
        }
        Ok(Self {
            kind: ContractKind::LimitedXl { coverage },
            u_min: 0.0,
            u_max: f64::INFINITY,
            u_cap: claims.integration_max(),
        })
    }

    /// Largest control used numerically: `u_max` when finite, else `u_cap`.
    pub fn upper(&self) -> f64 {
        if self.u_max.is_finite() {
            self.u_max
        } else {
            self.u_cap
        }
    }

    /// Clamps `u` to `[u_min, upper()]`.
    pub fn clamp(&self, u: f64) -> f64 {
        u.clamp(self.u_min, self.upper())
    }

    pub fn check_control(&self, u: f64) -> Result<()> {
        if u >= self.u_min && u <= self.u_max {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "control u = {u} outside [{}, {}] for {self}",
                self.u_min, self.u_max
            )))
        }
    }

    /// `Φ(z, u)`.
    pub fn retention(&self, z: f64, u: f64) -> Result<f64> {
        self.check_control(u)?;
        Ok(self.retained(z, u))
    }

    /// `∂Φ/∂u (z, u)`, right-derivative convention at kinks.
    pub fn retention_deriv(&self, z: f64, u: f64) -> Result<f64> {
        self.check_control(u)?;
        Ok(self.retained_deriv(z, u))
    }

    #[inline]
    pub(crate) fn retained(&self, z: f64, u: f64) -> f64 {
        match self.kind {
            ContractKind::Proportional => u * z,
            ContractKind::ExcessOfLoss => u.min(z),
            ContractKind::LimitedXl { coverage } => z - (z - u).max(0.0) + (z - u - coverage).max(0.0),
        }
    }

    /// `z - Φ(z, u)`.
    #[inline]
    pub(crate) fn ceded(&self, z: f64, u: f64) -> f64 {
        match self.kind {
            ContractKind::Proportional => (1.0 - u) * z,
            ContractKind::ExcessOfLoss => (z - u).max(0.0),
            ContractKind::LimitedXl { coverage } => (z - u).max(0.0).min(coverage),
        }
    }

    #[inline]
    pub(crate) fn retained_deriv(&self, z: f64, u: f64) -> f64 {
        match self.kind {
            ContractKind::Proportional => z,
            ContractKind::ExcessOfLoss => f64::from(u8::from(z > u)),
            ContractKind::LimitedXl { coverage } => f64::from(u8::from(u < z && z < u + coverage)),
        }
    }

    /// Points in `z` where `Φ(·, u)` is not smooth.
    pub fn kinks(&self, u: f64) -> Vec<f64> {
        match self.kind {
            ContractKind::Proportional => Vec::new(),
            ContractKind::ExcessOfLoss => vec![u],
            ContractKind::LimitedXl { coverage } => vec![u, u + coverage],
        }
    }

    /// `∫ (z - Φ(z, u))^k F(dz)` for `k ∈ {1, 2}`, in closed form.
    pub fn ceded_moments(&self, dist: &MarkDistribution, u: f64, order: u32) -> Result<f64> {
        self.check_moment_args(dist, u, order)?;
        Ok(self.ceded_moment_unchecked(dist, u, order))
    }

    /// Same quantity by 64-node Gauss–Legendre split at the kinks.
    pub fn ceded_moments_quadrature(&self, dist: &MarkDistribution, u: f64, order: u32) -> Result<f64> {
        self.check_moment_args(dist, u, order)?;
        let k = order as i32;
        Ok(dist.expect(&self.kinks(u), |z| self.ceded(z, u).powi(k)))
    }

    /// `d/du ∫ (z - Φ(z, u))^k F(dz) = -k ∫ (z - Φ)^{k-1} ∂Φ/∂u F(dz)`, closed form.
    pub fn ceded_moment_deriv(&self, dist: &MarkDistribution, u: f64, order: u32) -> Result<f64> {
        self.check_moment_args(dist, u, order)?;
        Ok(self.ceded_moment_deriv_unchecked(dist, u, order))
    }

    fn check_moment_args(&self, dist: &MarkDistribution, u: f64, order: u32) -> Result<()> {
        if !(1..=2).contains(&order) {
            return Err(Error::Domain(format!("moment order must be 1 or 2, got {order}")));
        }
        if !dist.is_bounded() {
            return config(format!(
                "claim law {dist} is unbounded; ceded moments need the unsafe-moments flag"
            ));
        }
        self.check_control(u)
    }

    pub(crate) fn ceded_moment_unchecked(&self, dist: &MarkDistribution, u: f64, order: u32) -> f64 {
        // a layer attached above every claim cedes nothing (also covers u = ∞)
        if self.kind != ContractKind::Proportional && u >= dist.support().1 {
            return 0.0;
        }
        if let MarkDistribution::PointMass { z0 } = *dist {
            return self.ceded(z0, u).powi(order as i32);
        }
        let pm = |lo, hi| dist.partial_moments(lo, hi);
        match (self.kind, order) {
            (ContractKind::Proportional, 1) => (1.0 - u) * dist.mean(),
            (ContractKind::Proportional, _) => (1.0 - u).powi(2) * dist.second_moment(),
            (ContractKind::ExcessOfLoss, 1) => {
                let m = pm(u, f64::INFINITY);
                m.p1 - u * m.p0
            }
            (ContractKind::ExcessOfLoss, _) => {
                let m = pm(u, f64::INFINITY);
                m.p2 - 2.0 * u * m.p1 + u * u * m.p0
            }
            (ContractKind::LimitedXl { coverage }, 1) => {
                let m = pm(u, u + coverage);
                let tail = pm(u + coverage, f64::INFINITY);
                m.p1 - u * m.p0 + coverage * tail.p0
            }
            (ContractKind::LimitedXl { coverage }, _) => {
                let m = pm(u, u + coverage);
                let tail = pm(u + coverage, f64::INFINITY);
                m.p2 - 2.0 * u * m.p1 + u * u * m.p0 + coverage * coverage * tail.p0
            }
        }
    }

    pub(crate) fn ceded_moment_deriv_unchecked(&self, dist: &MarkDistribution, u: f64, order: u32) -> f64 {
        // a layer attached above every claim cedes nothing (also covers u = ∞)
        if self.kind != ContractKind::Proportional && u >= dist.support().1 {
            return 0.0;
        }
        if let MarkDistribution::PointMass { z0 } = *dist {
            let base = if order == 1 { 1.0 } else { 2.0 * self.ceded(z0, u) };
            return -base * self.retained_deriv(z0, u);
        }
        let pm = |lo, hi| dist.partial_moments(lo, hi);
        match (self.kind, order) {
            (ContractKind::Proportional, 1) => -dist.mean(),
            (ContractKind::Proportional, _) => -2.0 * (1.0 - u) * dist.second_moment(),
            (ContractKind::ExcessOfLoss, 1) => -pm(u, f64::INFINITY).p0,
            (ContractKind::ExcessOfLoss, _) => {
                let m = pm(u, f64::INFINITY);
                -2.0 * (m.p1 - u * m.p0)
            }
            (ContractKind::LimitedXl { coverage }, 1) => -pm(u, u + coverage).p0,
            (ContractKind::LimitedXl { coverage }, _) => {
                let m = pm(u, u + coverage);
                -2.0 * (m.p1 - u * m.p0)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ContractKind::Proportional => "proportional",
            ContractKind::ExcessOfLoss => "excess_of_loss",
            ContractKind::LimitedXl { .. } => "limited_xl",
        }
    }
}

impl fmt::Display for RetentionContract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ContractKind::LimitedXl { coverage } => write!(f, "limited_xl(coverage={coverage})"),
            _ => f.write_str(self.name()),
        }
    }
}
