//! Closed-form evaluation of the intensity, its compensator and its mean.

use crate::error::{Error, Result};

use super::params::ModelParams;
use super::path::{JumpKind, JumpRecord, PathRecord};

/// `(1 - e^{-k h}) / k`, continuous at `k = 0`.
#[inline]
pub fn one_minus_exp_over(k: f64, h: f64) -> f64 {
    if k == 0.0 {
        h
    } else {
        -(-k * h).exp_m1() / k
    }
}

/// Intensity `h` time units after a point where it equalled `lam`, with no jumps in between.
#[inline]
pub fn decay(params: &ModelParams, lam: f64, h: f64) -> f64 {
    params.beta + (lam - params.beta) * (-params.alpha * h).exp()
}

pub(crate) fn is_strictly_sorted(jumps: &[JumpRecord]) -> bool {
    jumps.windows(2).all(|w| w[0].time < w[1].time)
}

/// λ_t for a path started at time 0 from `params.lambda0`, by the explicit
/// sum over jumps. Jumps at `t` are included (càdlàg value).
pub fn intensity_at(params: &ModelParams, jumps: &[JumpRecord], t: f64) -> Result<f64> {
    intensity_at_from(params, 0.0, params.lambda0, jumps, t, false)
}

/// λ_t for a path started at `(start, lam_start)`; `left_limit` excludes jumps at `t`.
pub fn intensity_at_from(
    params: &ModelParams,
    start: f64,
    lam_start: f64,
    jumps: &[JumpRecord],
    t: f64,
    left_limit: bool,
) -> Result<f64> {
    if !is_strictly_sorted(jumps) {
        return Err(Error::Structural(
            "jumps must be sorted by strictly increasing time".into(),
        ));
    }
    if t < start {
        return Err(Error::Domain(format!("t = {t} precedes path start {start}")));
    }
    let a = params.alpha;
    let mut lam = params.beta + (lam_start - params.beta) * (-a * (t - start)).exp();
    for j in jumps.iter().take_while(|j| j.time < t || (!left_limit && j.time == t)) {
        let size = match j.kind {
            JumpKind::Claim => params.self_excitation.eval(j.mark),
            JumpKind::External => j.mark,
        };
        lam += (-a * (t - j.time)).exp() * size;
    }
    Ok(lam)
}

/// `∫_0^h [β + (λc - β) e^{-αs}] ds`: the claim compensator over a jump-free stretch.
pub fn compensator_between(params: &ModelParams, lambda_current: f64, h: f64) -> Result<f64> {
    if h < 0.0 || h.is_nan() {
        return Err(Error::Domain(format!("compensator horizon must be >= 0, got {h}")));
    }
    Ok(compensator_unchecked(params, lambda_current, h))
}

#[inline]
pub(crate) fn compensator_unchecked(params: &ModelParams, lam: f64, h: f64) -> f64 {
    params.beta * h + (lam - params.beta) * one_minus_exp_over(params.alpha, h)
}

/// `∫_0^h λ(s)² ds` over a jump-free stretch started at `lam`.
pub(crate) fn squared_intensity_integral(params: &ModelParams, lam: f64, h: f64) -> f64 {
    let (a, b) = (params.alpha, params.beta);
    let d = lam - b;
    b * b * h + 2.0 * b * d * one_minus_exp_over(a, h) + d * d * one_minus_exp_over(2.0 * a, h)
}

/// `E[λ_t]` for the process started at time 0 from `λ0`.
///
/// Solves `m' = αβ + ρE[Z2] - κ m`, `κ = α - E[ℓ(Z1)]`, `m(0) = λ0`.
pub fn mean_intensity(params: &ModelParams, t: f64) -> f64 {
    mean_intensity_from(params, params.lambda0, t)
}

/// `E[λ_{s+h} | λ_s = lam]`.
pub fn mean_intensity_from(params: &ModelParams, lam: f64, h: f64) -> f64 {
    let drift = params.alpha * params.beta + params.rho * params.ext_dist.mean();
    let kappa = params.alpha - params.self_excitation.mean(&params.claim_dist);
    if kappa.abs() < 1e-14 {
        return lam + drift * h;
    }
    let m_inf = drift / kappa;
    m_inf + (lam - m_inf) * (-kappa * h).exp()
}

/// `E[∫_s^{s+h} λ_v dv | λ_s = lam]`: the expected number of claims over `h`.
pub fn mean_claim_count_from(params: &ModelParams, lam: f64, h: f64) -> f64 {
    let drift = params.alpha * params.beta + params.rho * params.ext_dist.mean();
    let kappa = params.alpha - params.self_excitation.mean(&params.claim_dist);
    if kappa.abs() < 1e-14 {
        return lam * h + 0.5 * drift * h * h;
    }
    let m_inf = drift / kappa;
    m_inf * h + (lam - m_inf) * one_minus_exp_over(kappa, h)
}

/// `ln L_T = -∫(λ_s - 1) ds + Σ_claims ln λ_{T_j-}` over the path's window.
pub fn log_density_ratio(params: &ModelParams, path: &PathRecord) -> Result<f64> {
    path.validate()?;
    let mut acc = 0.0;
    for seg in path.segments() {
        let h = seg.to - seg.from;
        acc -= compensator_unchecked(params, seg.intensity, h) - h;
        if let Some(j) = seg.end_jump {
            if j.kind == JumpKind::Claim {
                let left = decay(params, seg.intensity, h);
                if !(left > 0.0) {
                    return Err(Error::Numeric(format!(
                        "non-positive intensity {left} before claim at {}",
                        j.time
                    )));
                }
                acc += left.ln();
            }
        }
    }
    Ok(acc)
}
