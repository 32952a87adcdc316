//! Statistical diagnostics for simulated paths: the time-change test and the
//! generator (Dynkin) identity.

use crate::error::{Error, Result};
use crate::mc::{monte_carlo, Estimate};
use crate::rng::derive;

use super::intensity::{compensator_unchecked, squared_intensity_integral};
use super::params::ModelParams;
use super::path::{JumpKind, PathRecord};
use super::simulate::{simulate_into, Scheme};

/// Compensator increments between successive claims of `path`, starting from
/// the path start. The compensator mass after the last claim is dropped.
///
/// Within one path these are i.i.d. Exponential(1), but pooling them across
/// many short paths under-represents long gaps (they are the ones cut off at
/// the horizon); use [`pooled_time_change_increments`] for that.
pub fn time_change_increments(path: &PathRecord) -> Vec<f64> {
    let mut out = Vec::with_capacity(path.claim_count());
    accumulate_increments(path, 0.0, &mut out);
    out
}

/// Compensator increments of independent paths laid end to end.
///
/// Each path's time-changed claim process is a unit Poisson process on
/// `[0, Λ(T)]`, so concatenating them gives one unit Poisson process: the
/// residual mass after a path's last claim carries into the next path's first
/// gap. All increments are then i.i.d. Exponential(1) with no censoring bias.
pub fn pooled_time_change_increments<'a, I>(paths: I) -> Vec<f64>
where
    I: IntoIterator<Item = &'a PathRecord>,
{
    let mut out = Vec::new();
    let mut carry = 0.0;
    for path in paths {
        carry = accumulate_increments(path, carry, &mut out);
    }
    out
}

fn accumulate_increments(path: &PathRecord, mut acc: f64, out: &mut Vec<f64>) -> f64 {
    let p = &path.params;
    for seg in path.segments() {
        acc += compensator_unchecked(p, seg.intensity, seg.to - seg.from);
        if matches!(seg.end_jump, Some(j) if j.kind == JumpKind::Claim) {
            out.push(acc);
            acc = 0.0;
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// One-sample Kolmogorov–Smirnov test of `samples` against Exponential(1).
pub fn ks_exponential(samples: &[f64]) -> Result<KsResult> {
    ks_test(samples, |x| if x <= 0.0 { 0.0 } else { -(-x).exp_m1() })
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
///
/// The p-value uses the asymptotic Kolmogorov law with Stephens' small-sample
/// correction.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::Domain("KS test needs at least one sample".into()));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::Domain("KS test sample contains NaN".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let sn = n.sqrt();
    let p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
    Ok(KsResult {
        statistic: d,
        p_value,
        n: xs.len(),
    })
}

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Result of the generator identity `E f(λ_T) - f(λ_s) - E ∫ 𝓛f(λ_v) dv = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynkinReport {
    /// Which test function: `"lambda"` or `"lambda^2"`.
    pub function: &'static str,
    pub discrepancy: Estimate,
    /// `|mean| <= 3 stderr`.
    pub passed: bool,
}

/// Generator coefficients: for `f(λ) = λ`, `𝓛f = c0 + c1 λ`; for `f(λ) = λ²`,
/// `𝓛f = q0 + q1 λ + q2 λ²`.
fn generator_coefficients(p: &ModelParams) -> ([f64; 2], [f64; 3]) {
    let (a, b, rho) = (p.alpha, p.beta, p.rho);
    let el = p.self_excitation.mean(&p.claim_dist);
    let el2 = p.self_excitation.second_moment(&p.claim_dist);
    let ez2 = p.ext_dist.mean();
    let ez2sq = p.ext_dist.second_moment();
    let linear = [a * b + rho * ez2, el - a];
    let quadratic = [rho * ez2sq, 2.0 * a * b + el2 + 2.0 * rho * ez2, 2.0 * (el - a)];
    (linear, quadratic)
}

/// Dynkin check for `f(λ) = λ` and `f(λ) = λ²` over `[0, T]` from `λ0`,
/// path `i` using seed `derive(seed, i)`.
pub fn dynkin_check(params: &ModelParams, scheme: Scheme, n_paths: usize, seed: u64) -> Result<[DynkinReport; 2]> {
    params.validate()?;
    let (lin, quad) = generator_coefficients(params);
    let lam0 = params.lambda0;
    let est = monte_carlo(n_paths, 2, Vec::new, |buf, i, out| {
        simulate_into(scheme, params, 0.0, lam0, derive(seed, i), buf)?;
        let (mut time, mut lam) = (0.0, lam0);
        let (mut int1, mut int2) = (0.0, 0.0);
        for j in buf.iter() {
            let h = j.time - time;
            int1 += compensator_unchecked(params, lam, h);
            int2 += squared_intensity_integral(params, lam, h);
            lam = super::intensity::decay(params, lam, h) + j.intensity_jump(params);
            time = j.time;
        }
        let h = params.horizon - time;
        int1 += compensator_unchecked(params, lam, h);
        int2 += squared_intensity_integral(params, lam, h);
        let lam_t = super::intensity::decay(params, lam, h);
        let t = params.horizon;
        out[0] = lam_t - lam0 - (lin[0] * t + lin[1] * int1);
        out[1] = lam_t * lam_t - lam0 * lam0 - (quad[0] * t + quad[1] * int1 + quad[2] * int2);
        Ok(())
    })?;
    let report = |function, e: Estimate| DynkinReport {
        function,
        discrepancy: e,
        passed: e.mean.abs() <= 3.0 * e.stderr,
    };
    Ok([report("lambda", est[0]), report("lambda^2", est[1])])
}
