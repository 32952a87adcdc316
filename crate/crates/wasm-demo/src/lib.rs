//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Three operations, all cheap enough to rerun on every slider move:
//! simulating one intensity path, tabulating the Cox-optimal strategy with its
//! threshold loading over time, and estimating `φ(0, λ)` along a λ axis.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use reinsure_core::grid::linspace;
use reinsure_core::optimizer::{cox_optimal, thresholds, FocSpec, ThresholdReport, UnitRatio};
use reinsure_core::process::{decay, simulate, JumpKind, MarkDistribution, ModelParams, Scheme, SelfExcitation};
use reinsure_core::valuation::estimate_phi;
use reinsure_core::{Policy, PremiumPrinciple, Problem, RetentionContract};
use wasm_bindgen::prelude::*;

const U01: MarkDistribution = MarkDistribution::Uniform { a: 0.0, b: 1.0 };

fn js(e: reinsure_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Contagion model with uniform(0, 1) claims and shocks and ℓ(z) = `self_excitation`·z.
fn model(alpha: f64, beta: f64, lambda0: f64, rho: f64, self_excitation: f64, eta: f64, horizon: f64) -> ModelParams {
    ModelParams {
        alpha,
        beta,
        lambda0,
        rho,
        r: 0.0,
        eta,
        horizon,
        claim_dist: U01,
        ext_dist: U01,
        self_excitation: if self_excitation == 0.0 {
            SelfExcitation::Zero
        } else {
            SelfExcitation::Linear(self_excitation)
        },
        unsafe_moments: false,
    }
}

fn contract(kind: &str, coverage: f64) -> Result<RetentionContract, JsError> {
    match kind {
        "proportional" => Ok(RetentionContract::proportional()),
        "excess_of_loss" => Ok(RetentionContract::excess_of_loss(&U01)),
        "limited_xl" => RetentionContract::limited_xl(coverage, &U01).map_err(js),
        other => Err(JsError::new(&format!("unknown contract '{other}'"))),
    }
}

/// A simulated intensity path as a polyline plus its claim and shock times.
#[wasm_bindgen]
pub struct IntensityPath {
    times: Vec<f64>,
    values: Vec<f64>,
    claims: Vec<f64>,
    shocks: Vec<f64>,
}

#[wasm_bindgen]
impl IntensityPath {
    /// Polyline abscissae; jump times appear twice (left limit, then value).
    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }

    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    pub fn claims(&self) -> Vec<f64> {
        self.claims.clone()
    }

    pub fn shocks(&self) -> Vec<f64> {
        self.shocks.clone()
    }
}

/// Simulates one path on `[0, horizon]` and samples the intensity for plotting.
#[wasm_bindgen]
pub fn intensity_path(
    alpha: f64,
    beta: f64,
    lambda0: f64,
    rho: f64,
    self_excitation: f64,
    horizon: f64,
    seed: u64,
) -> Result<IntensityPath, JsError> {
    let p = model(alpha, beta, lambda0, rho, self_excitation, 1.0, horizon);
    p.validate().map_err(js)?;
    let path = simulate(Scheme::Exact, &p, 0.0, lambda0, seed).map_err(js)?;
    let mut out = IntensityPath {
        times: Vec::new(),
        values: Vec::new(),
        claims: Vec::new(),
        shocks: Vec::new(),
    };
    for seg in path.segments() {
        // a few points per segment are enough for a smooth exponential decay
        let n = (((seg.to - seg.from) / horizon * 400.0).ceil() as usize).max(2);
        for s in linspace(seg.from, seg.to, n) {
            out.times.push(s);
            out.values.push(decay(&p, seg.intensity, s - seg.from));
        }
        if let Some(j) = seg.end_jump {
            match j.kind {
                JumpKind::Claim => out.claims.push(j.time),
                JumpKind::External => out.shocks.push(j.time),
            }
        }
    }
    Ok(out)
}

/// Cox-optimal retention and threshold loading on a time grid.
#[wasm_bindgen]
pub struct StrategyCurves {
    times: Vec<f64>,
    retention: Vec<f64>,
    threshold: Vec<f64>,
}

#[wasm_bindgen]
impl StrategyCurves {
    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }

    pub fn retention(&self) -> Vec<f64> {
        self.retention.clone()
    }

    /// `θ^N(t)` for the proportional treaty, `θ^L(t)` for layers (which is 0
    /// without self-excitation).
    pub fn threshold(&self) -> Vec<f64> {
        self.threshold.clone()
    }
}

/// Cox-optimal strategy under the expected value principle, with the
/// threshold loading that separates the regions.
#[wasm_bindgen]
pub fn cox_curves(
    contract_kind: &str,
    coverage: f64,
    theta_r: f64,
    eta: f64,
    r: f64,
    horizon: f64,
    n: usize,
) -> Result<StrategyCurves, JsError> {
    let mut p = model(2.0, 1.0, 1.0, 0.5, 0.0, eta, horizon);
    p.r = r;
    let pb = Problem::new(
        p,
        contract(contract_kind, coverage)?,
        PremiumPrinciple::ExpectedValue {
            theta_i: theta_r,
            theta_r,
        },
    )
    .map_err(js)?;
    let foc = FocSpec::new(&pb, &UnitRatio);
    let times = linspace(0.0, horizon, n.max(2));
    let mut retention = Vec::with_capacity(times.len());
    let mut threshold = Vec::with_capacity(times.len());
    for &t in &times {
        retention.push(cox_optimal(t, &pb).map_err(js)?.u);
        threshold.push(match thresholds(t, 1.0, &foc).map_err(js)? {
            ThresholdReport::Proportional { theta_n, .. } => theta_n,
            ThresholdReport::Layer { theta_l } => theta_l,
        });
    }
    Ok(StrategyCurves {
        times,
        retention,
        threshold,
    })
}

/// Monte Carlo `φ(0, λ)` with standard errors along a λ axis.
#[wasm_bindgen]
pub struct PhiCurve {
    lambdas: Vec<f64>,
    mean: Vec<f64>,
    stderr: Vec<f64>,
}

#[wasm_bindgen]
impl PhiCurve {
    pub fn lambdas(&self) -> Vec<f64> {
        self.lambdas.clone()
    }

    pub fn mean(&self) -> Vec<f64> {
        self.mean.clone()
    }

    pub fn stderr(&self) -> Vec<f64> {
        self.stderr.clone()
    }
}

/// `φ(0, λ)` for a constant proportional retention `u`, using one seed for
/// every λ so that the curve is smooth (common random numbers).
#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn phi_vs_lambda(
    u: f64,
    theta_i: f64,
    theta_r: f64,
    self_excitation: f64,
    lambda_max: f64,
    n_lambda: usize,
    n_paths: usize,
    seed: u64,
) -> Result<PhiCurve, JsError> {
    let p = model(2.0, 1.0, 1.0, 0.5, self_excitation, 1.0, 1.0);
    let pb = Problem::new(
        p,
        RetentionContract::proportional(),
        PremiumPrinciple::ExpectedValue { theta_i, theta_r },
    )
    .map_err(js)?;
    if !(lambda_max > 1.0) {
        return Err(JsError::new("lambda_max must exceed the reversion level 1"));
    }
    let lambdas = linspace(1.0, lambda_max, n_lambda.max(2));
    let mut mean = Vec::with_capacity(lambdas.len());
    let mut stderr = Vec::with_capacity(lambdas.len());
    for &lam in &lambdas {
        let e = estimate_phi(&pb, &Policy::Constant(u), 0.0, lam, n_paths, seed).map_err(js)?;
        mean.push(e.mean);
        stderr.push(e.stderr);
    }
    Ok(PhiCurve { lambdas, mean, stderr })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_polyline_is_ordered_and_positive() {
        let p = intensity_path(2.0, 1.0, 1.0, 0.5, 1.0, 5.0, 3).ok().unwrap();
        assert_eq!(p.times.len(), p.values.len());
        assert!(p.times.windows(2).all(|w| w[0] <= w[1]));
        assert!(p.values.iter().all(|&v| v > 0.0));
        assert_eq!(*p.times.last().unwrap(), 5.0);
    }

    #[test]
    fn layer_curve_matches_closed_form() {
        let c = cox_curves("limited_xl", 0.5, 0.1, 2.0, 0.05, 1.0, 11).ok().unwrap();
        for (t, u) in c.times.iter().zip(&c.retention) {
            assert!((u - 1.1f64.ln() / (2.0 * (0.05 * (1.0 - t)).exp())).abs() < 1e-12);
        }
        assert!(c.threshold.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn phi_curve_has_one_point_per_lambda() {
        let c = phi_vs_lambda(0.5, 0.1, 0.3, 1.0, 3.0, 5, 200, 1).ok().unwrap();
        assert_eq!(c.mean.len(), 5);
        assert!(c.mean.iter().all(|&m| m > 0.0));
    }
}
