//! Pathwise evaluation of discounted premiums and retained claims.

use crate::problem::Problem;
use crate::process::intensity::{decay, one_minus_exp_over};
use crate::process::{JumpKind, JumpRecord, PathRecord};
use crate::quadrature::gl6;

use super::policy::Policy;

/// Discounted cash flows of one path on `(t0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PathTotals {
    /// `∫ e^{r(T-s)} (c_s - q_s) ds`.
    pub net_premium: f64,
    /// `Σ e^{r(T-T_j)} Φ(Z_j, u_{T_j})`.
    pub retained_claims: f64,
}

/// A policy bound to a problem, with per-unit premium rates precomputed where possible.
pub(crate) struct Evaluator<'a> {
    pub problem: &'a Problem,
    pub policy: &'a Policy,
    c_bar: f64,
    /// `c̄ - d(u)` for constant policies.
    constant_net: Option<f64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(problem: &'a Problem, policy: &'a Policy) -> Self {
        let c_bar = problem.insurance_unit_rate();
        let constant_net = match policy {
            Policy::Constant(u) => Some(c_bar - problem.reinsurance_unit_rate(*u)),
            _ => None,
        };
        Self {
            problem,
            policy,
            c_bar,
            constant_net,
        }
    }

    /// `c̄ - d(u(t, λ))`.
    #[inline]
    pub fn net_unit_rate(&self, t: f64, lam: f64) -> f64 {
        match self.constant_net {
            Some(k) => k,
            None => self.c_bar - self.problem.reinsurance_unit_rate(self.policy.control(t, lam)),
        }
    }

    /// `∫_a^b e^{r(T-s)} (c̄ - d(u_s)) λ_s ds` with `λ_a = lam` and no jumps in `(a, b)`.
    pub fn segment_premium(&self, a: f64, b: f64, lam: f64) -> f64 {
        let p = &self.problem.params;
        if !(b > a) {
            return 0.0;
        }
        if let Some(k) = self.constant_net {
            let h = b - a;
            let w = (p.r * (p.horizon - a)).exp();
            return k
                * w
                * (p.beta * one_minus_exp_over(p.r, h) + (lam - p.beta) * one_minus_exp_over(p.r + p.alpha, h));
        }
        let knots = self.policy.time_knots();
        let first = knots.partition_point(|&x| x <= a);
        let mut total = 0.0;
        let mut lo = a;
        for &k in knots[first..].iter().take_while(|&&k| k < b).chain(std::iter::once(&b)) {
            total += gl6().integrate(lo, k, |s| {
                let l = decay(p, lam, s - a);
                (p.r * (p.horizon - s)).exp() * self.net_unit_rate(s, l) * l
            });
            lo = k;
        }
        total
    }

    /// Cash-flow totals along the jumps of a path started at `(t0, lam0)`.
    pub fn totals(&self, t0: f64, lam0: f64, jumps: &[JumpRecord]) -> PathTotals {
        let p = &self.problem.params;
        let c = &self.problem.contract;
        let mut out = PathTotals::default();
        let (mut time, mut lam) = (t0, lam0);
        for j in jumps {
            out.net_premium += self.segment_premium(time, j.time, lam);
            let left = decay(p, lam, j.time - time);
            if j.kind == JumpKind::Claim {
                let u = self.policy.control(j.time, left);
                out.retained_claims += (p.r * (p.horizon - j.time)).exp() * c.retained(j.mark, u);
            }
            lam = left + j.intensity_jump(p);
            time = j.time;
        }
        out.net_premium += self.segment_premium(time, p.horizon, lam);
        out
    }

    /// `ln` of the φ-integrand: `-η (net_premium - retained_claims)`.
    #[inline]
    pub fn log_phi_sample(&self, t0: f64, lam0: f64, jumps: &[JumpRecord]) -> f64 {
        let tot = self.totals(t0, lam0, jumps);
        -self.problem.params.eta * (tot.net_premium - tot.retained_claims)
    }
}

/// Terminal wealth `X_T` of a path started at `(t0, x0)`:
/// `x0 e^{r(T-t0)} + ∫ e^{r(T-s)}(c - q) ds - Σ e^{r(T-T_j)} Φ(Z_j, u_{T_j})`.
pub fn terminal_wealth(problem: &Problem, policy: &Policy, path: &PathRecord, x0: f64) -> crate::Result<f64> {
    path.validate()?;
    policy.validate(&problem.contract)?;
    let ev = Evaluator::new(problem, policy);
    let tot = ev.totals(path.start, path.initial_intensity, &path.jumps);
    let p = &problem.params;
    Ok(x0 * (p.r * (p.horizon - path.start)).exp() + tot.net_premium - tot.retained_claims)
}
