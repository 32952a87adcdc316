use crate::error::{config, Result};

use super::marks::{MarkDistribution, SelfExcitation};

/// Constants of the dynamic contagion model and of the insurer's problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Exponential decay rate of the intensity.
    pub alpha: f64,
    /// Reversion level of the intensity.
    pub beta: f64,
    /// Intensity at time 0.
    pub lambda0: f64,
    /// Rate of the external shock process.
    pub rho: f64,
    /// Risk-free rate.
    pub r: f64,
    /// Risk aversion of the exponential utility.
    pub eta: f64,
    /// Time horizon T.
    pub horizon: f64,
    /// Claim size law F^(1).
    pub claim_dist: MarkDistribution,
    /// External jump size law F^(2).
    pub ext_dist: MarkDistribution,
    /// ℓ: intensity jump caused by a claim.
    pub self_excitation: SelfExcitation,
    /// Admit unbounded mark laws. Exponential moments then exist only up to
    /// a finite order; see [`ModelParams::exponential_moment_bound`].
    pub unsafe_moments: bool,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("alpha", self.alpha, self.alpha > 0.0),
            ("beta", self.beta, self.beta > 0.0),
            ("lambda0", self.lambda0, self.lambda0 > 0.0),
            ("rho", self.rho, self.rho >= 0.0),
            ("r", self.r, self.r >= 0.0),
            ("eta", self.eta, self.eta > 0.0),
            ("horizon", self.horizon, self.horizon > 0.0),
        ];
        for (name, v, ok) in checks {
            if !ok || !v.is_finite() {
                return config(format!("model.{name} = {v} is out of range"));
            }
        }
        self.claim_dist.validate()?;
        self.ext_dist.validate()?;
        self.self_excitation.validate()?;
        if !self.unsafe_moments {
            if !self.claim_dist.is_bounded() {
                return config(format!(
                    "model.claim_dist = {} is unbounded; set unsafe_moments to allow it",
                    self.claim_dist
                ));
            }
            if !self.ext_dist.is_bounded() && self.rho > 0.0 {
                return config(format!(
                    "model.ext_dist = {} is unbounded; set unsafe_moments to allow it",
                    self.ext_dist
                ));
            }
        }
        Ok(())
    }

    /// The same model with ℓ ≡ 0 (the Cox shot-noise twin).
    pub fn cox_twin(&self) -> Self {
        Self {
            self_excitation: SelfExcitation::Zero,
            ..self.clone()
        }
    }

    /// `η e^{r(T-t)}`: the marginal disutility weight of a unit of wealth at time t.
    #[inline]
    pub fn risk_weight(&self, t: f64) -> f64 {
        self.eta * (self.r * (self.horizon - t)).exp()
    }

    /// For unbounded claim laws, the largest exponent `s` with `E[e^{sZ}] < ∞`.
    ///
    /// Valuation of any strategy requires `η e^{rT}` below this bound.
    pub fn exponential_moment_bound(&self) -> f64 {
        match self.claim_dist {
            MarkDistribution::Exponential { rate } => rate,
            _ => f64::INFINITY,
        }
    }

    /// Lower bound of the intensity along every path.
    pub fn intensity_floor(&self) -> f64 {
        self.lambda0.min(self.beta)
    }
}
