//! The φ-representation under the reference measure in which claims arrive at
//! unit rate, for strategies that are deterministic in time.
//!
//! With `a(s) = 1 + η e^{r(T-s)} (c̄ - d(u_s))` and
//! `A(v) = ∫_v^T a(s) e^{-α(s-v)} ds`, the density process turns the
//! φ-functional into
//!
//! ```text
//! exp{ (T-t) - β∫_t^T a - (λ-β) A(t) - Σ_ext A(T_k) Z_k
//!      + Σ_claims [ ln λ_{T_j-} + η e^{r(T-T_j)} Φ(Z_j, u_{T_j}) - A(T_j) ℓ(Z_j) ] }
//! ```
//!
//! where every term involving the future control is a deterministic function
//! of time.

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::process::intensity::{decay, one_minus_exp_over};
use crate::quadrature::gl128;

use super::policy::Policy;

/// Deterministic coefficients `a`, `A`, `B` for a time-only strategy.
pub struct MeasureChange<'a> {
    problem: &'a Problem,
    policy: &'a Policy,
    c_bar: f64,
    constant_net: Option<f64>,
}

impl<'a> MeasureChange<'a> {
    pub fn new(problem: &'a Problem, policy: &'a Policy) -> Result<Self> {
        if !policy.is_deterministic() {
            return Err(Error::Unsupported(
                "the reference-measure representation needs a policy that is deterministic in time".into(),
            ));
        }
        policy.validate(&problem.contract)?;
        let c_bar = problem.insurance_unit_rate();
        let constant_net = match policy {
            Policy::Constant(u) => Some(c_bar - problem.reinsurance_unit_rate(*u)),
            _ => None,
        };
        Ok(Self {
            problem,
            policy,
            c_bar,
            constant_net,
        })
    }

    #[inline]
    fn net(&self, s: f64) -> f64 {
        match self.constant_net {
            Some(k) => k,
            None => self.c_bar - self.problem.reinsurance_unit_rate(self.policy.control(s, 0.0)),
        }
    }

    /// `u_s`.
    #[inline]
    pub fn control(&self, s: f64) -> f64 {
        self.policy.control(s, 0.0)
    }

    /// `a(s) = 1 + η e^{r(T-s)} (c̄ - d(u_s))`.
    pub fn a(&self, s: f64) -> f64 {
        1.0 + self.problem.params.risk_weight(s) * self.net(s)
    }

    fn integrate<F: FnMut(f64) -> f64>(&self, v: f64, f: F) -> f64 {
        let horizon = self.problem.params.horizon;
        let knots = self.policy.time_knots();
        let inner: Vec<f64> = knots.iter().copied().filter(|&k| k > v && k < horizon).collect();
        gl128().integrate_split(v, horizon, &inner, f)
    }

    /// `A(v) = ∫_v^T a(s) e^{-α(s-v)} ds`.
    pub fn big_a(&self, v: f64) -> f64 {
        let p = &self.problem.params;
        let h = p.horizon - v;
        if h <= 0.0 {
            return 0.0;
        }
        match self.constant_net {
            Some(k) => {
                one_minus_exp_over(p.alpha, h) + p.eta * k * (p.r * h).exp() * one_minus_exp_over(p.alpha + p.r, h)
            }
            None => self.integrate(v, |s| self.a(s) * (-p.alpha * (s - v)).exp()),
        }
    }

    /// `∫_t^T a(s) ds`.
    pub fn integral_a(&self, t: f64) -> f64 {
        let p = &self.problem.params;
        let h = p.horizon - t;
        if h <= 0.0 {
            return 0.0;
        }
        match self.constant_net {
            Some(k) => h + p.eta * k * (p.r * h).exp() * one_minus_exp_over(p.r, h),
            None => self.integrate(t, |s| self.a(s)),
        }
    }

    /// `B(t, z) = exp{η e^{r(T-t)} Φ(z, u_t) - A(t) ℓ(z)}`.
    pub fn big_b(&self, t: f64, z: f64) -> f64 {
        let p = &self.problem.params;
        let u = self.control(t);
        (p.risk_weight(t) * self.problem.contract.retained(z, u) - self.big_a(t) * p.self_excitation.eval(z)).exp()
    }

    /// `∫ B(t, z) F(dz) - a(t)`.
    pub fn monotonicity_margin(&self, t: f64) -> f64 {
        let u = self.control(t);
        let p = &self.problem.params;
        let kappa = p.risk_weight(t);
        let a_big = self.big_a(t);
        let mut breaks = self.problem.contract.kinks(u);
        breaks.retain(|x| x.is_finite());
        let integral = p.claim_dist.expect(&breaks, |z| {
            (kappa * self.problem.contract.retained(z, u) - a_big * p.self_excitation.eval(z)).exp()
        });
        integral - self.a(t)
    }

    /// Log-weight of one reference-measure path started at `(t, lam)`.
    pub(crate) fn log_weight(&self, t: f64, lam: f64, jumps: &[crate::process::JumpRecord]) -> f64 {
        let p = &self.problem.params;
        let mut acc = (p.horizon - t) - p.beta * self.integral_a(t) - (lam - p.beta) * self.big_a(t);
        let (mut time, mut l) = (t, lam);
        for j in jumps {
            let left = decay(p, l, j.time - time);
            match j.kind {
                crate::process::JumpKind::Claim => {
                    let ell = p.self_excitation.eval(j.mark);
                    let a_big = if ell != 0.0 { self.big_a(j.time) } else { 0.0 };
                    acc += left.ln()
                        + p.risk_weight(j.time) * self.problem.contract.retained(j.mark, self.control(j.time))
                        - a_big * ell;
                }
                crate::process::JumpKind::External => acc -= self.big_a(j.time) * j.mark,
            }
            l = left + j.intensity_jump(p);
            time = j.time;
        }
        acc
    }
}
