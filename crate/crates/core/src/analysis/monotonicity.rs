//! Is `φ(t, λ)` increasing in `λ`? A deterministic sufficient condition and a
//! coupled Monte Carlo test.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::mc::{map_indexed, monte_carlo_scalar, Estimate};
use crate::problem::Problem;
use crate::process::{fmt17, simulate_into, Scheme};
use crate::rng::derive;
use crate::valuation::functional::Evaluator;
use crate::valuation::{MeasureChange, Policy};

/// Margins `∫ B(t, z) F(dz) - a(t)` of the sufficient condition on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StranaReport {
    pub rows: Vec<(f64, f64)>,
    pub min_margin: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl StranaReport {
    /// CSV with columns `t,margin,pass`.
    pub fn to_csv(&self, comment: Option<&str>) -> String {
        let mut out = String::new();
        crate::table_io::write_comment(&mut out, comment);
        out.push_str("t,margin,pass\n");
        for &(t, m) in &self.rows {
            let _ = writeln!(out, "{},{},{}", fmt17(t), fmt17(m), m >= -self.tolerance);
        }
        out
    }
}

/// Evaluates the sufficient condition for monotonicity of `φ` in `λ` along
/// `t_grid` for a deterministic policy. Passes when every margin is `>= -tol`.
pub fn strana_check(problem: &Problem, policy: &Policy, t_grid: &[f64], tol: f64) -> Result<StranaReport> {
    let mc = MeasureChange::new(problem, policy)?;
    if t_grid.is_empty() {
        return Err(Error::Domain("strana check needs at least one time".into()));
    }
    let horizon = problem.params.horizon;
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if !(0.0..=horizon).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, {horizon}]")));
        }
        rows.push((t, mc.monotonicity_margin(t)));
    }
    let min_margin = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(StranaReport {
        rows,
        min_margin,
        tolerance: tol,
        passed: min_margin >= -tol,
    })
}

/// Paired estimate of `φ(t, λ2) - φ(t, λ1)`: both starting points share every
/// path's random numbers through the coupled scheme.
pub fn coupled_monotonicity(
    problem: &Problem,
    policy: &Policy,
    t: f64,
    lam1: f64,
    lam2: f64,
    n_paths: usize,
    seed: u64,
) -> Result<Estimate> {
    if !(lam1 > 0.0 && lam1 <= lam2 && lam2.is_finite()) {
        return Err(Error::Domain(format!(
            "need 0 < lambda1 <= lambda2, got {lam1}, {lam2}"
        )));
    }
    let horizon = problem.params.horizon;
    if !(0.0..=horizon).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, {horizon}]")));
    }
    policy.validate(&problem.contract)?;
    if t == horizon || lam1 == lam2 {
        return monte_carlo_scalar(n_paths, || (), |_, _| Ok(0.0));
    }
    let ev = Evaluator::new(problem, policy);
    let p = &problem.params;
    monte_carlo_scalar(
        n_paths,
        || (Vec::new(), Vec::new()),
        |(b1, b2), i| {
            let s = derive(seed, i);
            simulate_into(Scheme::Coupled, p, t, lam1, s, b1)?;
            simulate_into(Scheme::Coupled, p, t, lam2, s, b2)?;
            Ok(ev.log_phi_sample(t, lam2, b2).exp() - ev.log_phi_sample(t, lam1, b1).exp())
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityProbe {
    pub t: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub difference: Estimate,
    /// `mean >= -3 stderr`.
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub probes: Vec<MonotonicityProbe>,
    pub passed: bool,
}

impl MonotonicityReport {
    /// CSV with columns `t,lambda1,lambda2,difference,stderr,pass`.
    pub fn to_csv(&self, comment: Option<&str>) -> String {
        let mut out = String::new();
        crate::table_io::write_comment(&mut out, comment);
        out.push_str("t,lambda1,lambda2,difference,stderr,pass\n");
        for p in &self.probes {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt17(p.t),
                fmt17(p.lambda1),
                fmt17(p.lambda2),
                fmt17(p.difference.mean),
                fmt17(p.difference.stderr),
                p.passed
            );
        }
        out
    }
}

/// Coupled test of `φ(t, 2λ) >= φ(t, λ)` on every `(t, λ)` probe pair; probe
/// `k` uses seed `derive(seed, k)`.
pub fn monotonicity_probe(
    problem: &Problem,
    policy: &Policy,
    times: &[f64],
    lambdas: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<MonotonicityReport> {
    let n = times.len() * lambdas.len();
    let results = map_indexed(n, |k| {
        let (t, l) = (times[k / lambdas.len()], lambdas[k % lambdas.len()]);
        coupled_monotonicity(problem, policy, t, l, 2.0 * l, n_paths, derive(seed, k as u64)).map(|d| {
            MonotonicityProbe {
                t,
                lambda1: l,
                lambda2: 2.0 * l,
                difference: d,
                passed: d.mean >= -3.0 * d.stderr,
            }
        })
    });
    let probes = results.into_iter().collect::<Result<Vec<_>>>()?;
    let passed = probes.iter().all(|p| p.passed);
    Ok(MonotonicityReport { probes, passed })
}
