//! A fully specified reinsurance problem: claim model, treaty and premiums.

use crate::contracts::{PremiumPrinciple, RetentionContract};
use crate::error::{config, Result};
use crate::process::{MarkDistribution, ModelParams};

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub params: ModelParams,
    pub contract: RetentionContract,
    pub principle: PremiumPrinciple,
}

impl Problem {
    /// Validates every component and their compatibility.
    pub fn new(params: ModelParams, contract: RetentionContract, principle: PremiumPrinciple) -> Result<Self> {
        params.validate()?;
        principle.validate()?;
        let bound = params.exponential_moment_bound();
        let weight = params.risk_weight(0.0);
        if !(weight < bound) {
            return config(format!(
                "eta*exp(r*T) = {weight} must stay below the claim law's exponential moment bound {bound}"
            ));
        }
        if contract.u_min > contract.upper() {
            return config(format!("contract {contract} has an empty control interval"));
        }
        Ok(Self {
            params,
            contract,
            principle,
        })
    }

    /// The same problem for the ℓ ≡ 0 twin model.
    pub fn cox_twin(&self) -> Self {
        Self {
            params: self.params.cox_twin(),
            ..self.clone()
        }
    }

    #[inline]
    pub fn claims(&self) -> &MarkDistribution {
        &self.params.claim_dist
    }

    /// `c̄`: insurance premium per unit intensity.
    pub fn insurance_unit_rate(&self) -> f64 {
        self.principle.insurance_unit_rate(self.claims())
    }

    /// `d(u)`: reinsurance premium per unit intensity.
    #[inline]
    pub fn reinsurance_unit_rate(&self, u: f64) -> f64 {
        self.principle.reinsurance_unit_rate(&self.contract, self.claims(), u)
    }

    /// `d'(u)`.
    #[inline]
    pub fn reinsurance_unit_rate_deriv(&self, u: f64) -> f64 {
        self.principle
            .reinsurance_unit_rate_deriv(&self.contract, self.claims(), u)
    }

    /// `E[e^{κ Φ(Z, u)}]` under the claim law.
    pub fn exp_retained(&self, u: f64, kappa: f64) -> f64 {
        let d = self.claims();
        match (self.contract.kind, d) {
            (crate::contracts::ContractKind::Proportional, _) => d.mgf(kappa * u).unwrap_or(f64::INFINITY),
            _ => d.expect(&self.contract.kinks(u), |z| {
                (kappa * self.contract.retained(z, u)).exp()
            }),
        }
    }
}
