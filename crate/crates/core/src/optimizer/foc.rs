//! First-order condition for the optimal retention level and the threshold
//! loadings that separate the three regions.
//!
//! Dividing the first-order function by `λ φ(t, λ)` gives
//!
//! ```text
//! h̃(u) = -d'(u) - ∫ R(z) e^{κ Φ(z,u)} ∂Φ/∂u(z,u) F(dz),   κ = η e^{r(T-t)},
//! ```
//!
//! with `R(z) = φ(t, λ + ℓ(z)) / φ(t, λ)`. Under the concavity hypothesis
//! `h̃` is nonincreasing in `u`: the optimum is `u_M` when `h̃(u_M) < 0`,
//! `u_N` when `h̃(u_N) > 0`, and the root of `h̃` otherwise.

use crate::contracts::ContractKind;
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::roots::bisect_decreasing;
use crate::valuation::PhiTable;

use super::table::Region;

/// `(t, λ, jump) ↦ φ(t, λ + jump) / φ(t, λ)`.
pub trait PhiRatio: Sync {
    fn ratio(&self, t: f64, lam: f64, jump: f64) -> f64;
}

/// `φ` independent of `λ` (the ℓ ≡ 0 case, or a deliberate Cox approximation).
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitRatio;

impl PhiRatio for UnitRatio {
    fn ratio(&self, _t: f64, _lam: f64, _jump: f64) -> f64 {
        1.0
    }
}

/// Ratio read from a tabulated `φ`, held flat above the largest grid intensity.
#[derive(Debug, Clone, Copy)]
pub struct TableRatio<'a> {
    pub table: &'a PhiTable,
}

impl PhiRatio for TableRatio<'_> {
    fn ratio(&self, t: f64, lam: f64, jump: f64) -> f64 {
        if jump == 0.0 {
            return 1.0;
        }
        self.table.interpolate(t, lam + jump) / self.table.interpolate(t, lam)
    }
}

/// Ratio given by a closure.
pub struct FnRatio<F>(pub F);

impl<F: Fn(f64, f64, f64) -> f64 + Sync> PhiRatio for FnRatio<F> {
    fn ratio(&self, t: f64, lam: f64, jump: f64) -> f64 {
        (self.0)(t, lam, jump)
    }
}

/// Everything the first-order condition needs.
#[derive(Clone, Copy)]
pub struct FocSpec<'a> {
    pub problem: &'a Problem,
    pub phi_ratio: &'a dyn PhiRatio,
}

/// A control together with the region that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Control {
    pub u: f64,
    pub region: Region,
}

/// Threshold loadings at one `(t, λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdReport {
    /// Proportional treaty: full reinsurance iff `θ_R < θ^F`, none iff `θ_R > θ^N`.
    Proportional { theta_f: f64, theta_n: f64 },
    /// (Limited) excess of loss: maximal reinsurance iff `θ_R < θ^L`.
    Layer { theta_l: f64 },
}

impl<'a> FocSpec<'a> {
    pub fn new(problem: &'a Problem, phi_ratio: &'a dyn PhiRatio) -> Self {
        Self { problem, phi_ratio }
    }

    /// `h̃(t, λ, u)`.
    pub fn h(&self, t: f64, lam: f64, u: f64) -> f64 {
        let pb = self.problem;
        let p = &pb.params;
        let kappa = p.risk_weight(t);
        let c = &pb.contract;
        let integral = match c.kind {
            ContractKind::Proportional => pb
                .claims()
                .expect(&[], |z| self.jump_ratio(t, lam, z) * (kappa * u * z).exp() * z),
            // ∂Φ/∂u is the indicator of the layer, where Φ = u
            ContractKind::ExcessOfLoss | ContractKind::LimitedXl { .. } => {
                let hi = match c.kind {
                    ContractKind::LimitedXl { coverage } => u + coverage,
                    _ => f64::INFINITY,
                };
                let d = pb.claims();
                let mass = if let crate::process::MarkDistribution::PointMass { z0 } = *d {
                    if u < z0 && z0 < hi {
                        self.jump_ratio(t, lam, z0)
                    } else {
                        0.0
                    }
                } else {
                    d.integrate(u, hi, &[], |z| self.jump_ratio(t, lam, z))
                };
                (kappa * u).exp() * mass
            }
        };
        -pb.reinsurance_unit_rate_deriv(u) - integral
    }

    #[inline]
    fn jump_ratio(&self, t: f64, lam: f64, z: f64) -> f64 {
        self.phi_ratio
            .ratio(t, lam, self.problem.params.self_excitation.eval(z))
    }

    /// `Ψ^u / (λ φ)` up to terms free of `u`: `κ d(u) + ∫ R(z) e^{κΦ(z,u)} F(dz)`.
    /// Its `u`-derivative is `-κ h̃`.
    pub fn psi(&self, t: f64, lam: f64, u: f64) -> f64 {
        let pb = self.problem;
        let kappa = pb.params.risk_weight(t);
        let c = &pb.contract;
        let mut breaks = c.kinks(u);
        breaks.retain(|x| x.is_finite());
        kappa * pb.reinsurance_unit_rate(u)
            + pb.claims().expect(&breaks, |z| {
                self.jump_ratio(t, lam, z) * (kappa * c.retained(z, u)).exp()
            })
    }

    /// Threshold loadings at `(t, λ)`, with normalisers computed by the same
    /// quadrature as the numerators.
    pub fn thresholds(&self, t: f64, lam: f64) -> Result<ThresholdReport> {
        let pb = self.problem;
        let d = pb.claims();
        let kappa = pb.params.risk_weight(t);
        match pb.contract.kind {
            ContractKind::Proportional => {
                let ez = d.expect(&[], |z| z);
                if !(ez > 0.0) {
                    return Err(Error::Config("claim law has zero mean; thresholds undefined".into()));
                }
                let f = d.expect(&[], |z| self.jump_ratio(t, lam, z) * z);
                let n = d.expect(&[], |z| self.jump_ratio(t, lam, z) * z * (kappa * z).exp());
                Ok(ThresholdReport::Proportional {
                    theta_f: f / ez - 1.0,
                    theta_n: n / ez - 1.0,
                })
            }
            ContractKind::ExcessOfLoss | ContractKind::LimitedXl { .. } => {
                let hi = match pb.contract.kind {
                    ContractKind::LimitedXl { coverage } => coverage,
                    _ => f64::INFINITY,
                };
                let mass = d.integrate(0.0, hi, &[], |_| 1.0);
                if !(mass > 0.0) {
                    return Err(Error::Config(format!(
                        "claim law puts no mass below the coverage of {}; threshold undefined",
                        pb.contract
                    )));
                }
                let num = d.integrate(0.0, hi, &[], |z| self.jump_ratio(t, lam, z));
                Ok(ThresholdReport::Layer {
                    theta_l: num / mass - 1.0,
                })
            }
        }
    }

    /// Optimal control at `(t, λ)` from the sign pattern of `h̃` and bisection.
    pub fn solve(&self, t: f64, lam: f64) -> Result<Control> {
        let c = &self.problem.contract;
        let (lo, hi) = (c.u_min, c.upper());
        let h_lo = self.h(t, lam, lo);
        let h_hi = self.h(t, lam, hi);
        if !h_lo.is_finite() || !h_hi.is_finite() {
            return Err(Error::Numeric(format!(
                "first-order function not finite at (t={t}, lambda={lam}): h(u_M)={h_lo}, h(u_N)={h_hi}"
            )));
        }
        match (h_lo < 0.0, h_hi > 0.0) {
            (true, true) => Err(Error::ConcavityViolation {
                t,
                lambda: lam,
                h_min: h_lo,
                h_max: h_hi,
            }),
            (true, false) => Ok(Control {
                u: lo,
                region: Region::A0,
            }),
            (false, true) => Ok(Control {
                u: hi,
                region: Region::A1,
            }),
            (false, false) => {
                let root = bisect_decreasing(|u| self.h(t, lam, u), lo, hi).map_err(|e| {
                    Error::Numeric(format!(
                        "first-order root at (t={t}, lambda={lam}) on [{lo}, {hi}]: {e}"
                    ))
                })?;
                let u = root.x.clamp(lo, hi);
                // A layer treaty whose first-order function vanishes only above
                // the claim support buys no cover: that is null reinsurance.
                let region = if u >= hi && !c.u_max.is_finite() {
                    Region::A1
                } else {
                    Region::Interior
                };
                Ok(Control { u, region })
            }
        }
    }
}

/// Free-function form of [`FocSpec::solve`].
pub fn solve_foc(t: f64, lam: f64, foc: &FocSpec<'_>) -> Result<Control> {
    foc.solve(t, lam)
}

/// Free-function form of [`FocSpec::thresholds`].
pub fn thresholds(t: f64, lam: f64, foc: &FocSpec<'_>) -> Result<ThresholdReport> {
    foc.thresholds(t, lam)
}
