//! Optimal strategies when the intensity does not feed back on claims (ℓ ≡ 0).
//! The first-order condition then no longer involves `φ`, and the optimum is a
//! deterministic function of time.

use crate::contracts::{ContractKind, PremiumPrinciple};
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::roots::bisect_decreasing;

use super::foc::{Control, FocSpec, UnitRatio};
use super::table::Region;

/// Cox-optimal retention at time `t` for `problem`'s treaty and premiums.
///
/// * (limited) excess of loss under the expected value principle:
///   `ln(1 + θ_R) / (η e^{r(T-t)})`, capped at the claim support;
/// * proportional under the expected value principle: null reinsurance when
///   `θ_R > θ^N(t)`, otherwise the root of `(1 + θ_R) E[Z] = ∫ z e^{κ z u} F(dz)`;
/// * other principles: the first-order condition with a unit `φ`-ratio.
pub fn cox_optimal(t: f64, problem: &Problem) -> Result<Control> {
    let p = &problem.params;
    if !(0.0..=p.horizon).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, {}]", p.horizon)));
    }
    let kappa = p.risk_weight(t);
    let c = &problem.contract;
    match (problem.principle, c.kind) {
        (
            PremiumPrinciple::ExpectedValue { theta_r, .. },
            ContractKind::ExcessOfLoss | ContractKind::LimitedXl { .. },
        ) => {
            let u = theta_r.ln_1p() / kappa;
            if u >= c.upper() {
                Ok(Control {
                    u: c.upper(),
                    region: Region::A1,
                })
            } else {
                Ok(Control {
                    u: u.max(c.u_min),
                    region: Region::Interior,
                })
            }
        }
        (PremiumPrinciple::ExpectedValue { theta_r, .. }, ContractKind::Proportional) => {
            let d = problem.claims();
            let ez = d.expect(&[], |z| z);
            let theta_n = d.expect(&[], |z| z * (kappa * z).exp()) / ez - 1.0;
            if theta_r > theta_n {
                return Ok(Control {
                    u: c.u_max,
                    region: Region::A1,
                });
            }
            let target = (1.0 + theta_r) * ez;
            let root = bisect_decreasing(
                |u| target - d.expect(&[], |z| z * (kappa * u * z).exp()),
                c.u_min,
                c.u_max,
            )
            .map_err(|e| Error::Numeric(format!("Cox proportional root at t={t} on [0, 1]: {e}")))?;
            Ok(Control {
                u: root.x,
                region: Region::Interior,
            })
        }
        _ => FocSpec::new(problem, &UnitRatio).solve(t, 0.0),
    }
}
