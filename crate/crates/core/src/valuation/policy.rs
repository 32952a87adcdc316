//! Reinsurance strategies `u(t, λ_{t-})` to be valued.

use crate::contracts::RetentionContract;
use crate::error::{Error, Result};
use crate::grid::bracket;
use crate::optimizer::PolicyTable;

/// Piecewise-linear curve `t ↦ u(t)`, held flat outside its knots.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeCurve {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::Structural(format!(
                "time curve needs matching non-empty knots and values, got {} and {}",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) || times.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::Structural(
                "time curve knots must be finite and strictly increasing".into(),
            ));
        }
        Ok(Self { times, values })
    }

    /// Samples `f` on `times`.
    pub fn sample<F: FnMut(f64) -> Result<f64>>(times: Vec<f64>, mut f: F) -> Result<Self> {
        let values = times.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
        Self::new(times, values)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let (k, w) = bracket(&self.times, t);
        let k1 = (k + 1).min(self.times.len() - 1);
        self.values[k] + w * (self.values[k1] - self.values[k])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    /// The same retention level at all times and states.
    Constant(f64),
    /// Deterministic in time.
    TimeCurve(TimeCurve),
    /// Feedback in time and the pre-jump intensity.
    Table(PolicyTable),
}

impl Policy {
    /// `u(t, λ)`, with `λ` the left-limit intensity.
    #[inline]
    pub fn control(&self, t: f64, lam: f64) -> f64 {
        match self {
            Self::Constant(u) => *u,
            Self::TimeCurve(c) => c.eval(t),
            Self::Table(tab) => tab.control(t, lam),
        }
    }

    /// True when the control does not depend on the state.
    pub fn is_deterministic(&self) -> bool {
        !matches!(self, Self::Table(_))
    }

    /// Times at which the control may have a kink in `t`.
    pub fn time_knots(&self) -> &[f64] {
        match self {
            Self::Constant(_) => &[],
            Self::TimeCurve(c) => &c.times,
            Self::Table(tab) => &tab.grid.times,
        }
    }

    pub fn validate(&self, contract: &RetentionContract) -> Result<()> {
        let values: &[f64] = match self {
            Self::Constant(u) => std::slice::from_ref(u),
            Self::TimeCurve(c) => &c.values,
            Self::Table(tab) => {
                if tab.contract.kind != contract.kind {
                    return Err(Error::Config(format!(
                        "policy table built for {} but valued under {contract}",
                        tab.contract
                    )));
                }
                &tab.values
            }
        };
        for &u in values {
            contract.check_control(u)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_interpolates_and_extrapolates_flat() {
        let c = TimeCurve::new(vec![0.0, 1.0, 2.0], vec![0.2, 0.4, 0.0]).unwrap();
        assert!((c.eval(0.5) - 0.3).abs() < 1e-15);
        assert!((c.eval(1.5) - 0.2).abs() < 1e-15);
        assert_eq!(c.eval(-1.0), 0.2);
        assert_eq!(c.eval(3.0), 0.0);
        assert!(TimeCurve::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn validation_checks_domain() {
        let p = RetentionContract::proportional();
        assert!(Policy::Constant(0.5).validate(&p).is_ok());
        assert!(Policy::Constant(1.5).validate(&p).is_err());
        let c = TimeCurve::new(vec![0.0, 1.0], vec![0.5, -0.1]).unwrap();
        assert!(Policy::TimeCurve(c).validate(&p).is_err());
    }
}
