//! Monte Carlo estimators of `φ(t, λ)` and closed-form oracles.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::mc::{map_indexed, monte_carlo_scalar, Estimate};
use crate::problem::Problem;
use crate::process::intensity::{compensator_unchecked, decay};
use crate::process::{simulate_into, JumpRecord, ModelParams, Scheme};
use crate::quadrature::gl128;
use crate::rng::{derive, exp1, stream};

use super::functional::Evaluator;
use super::measure_change::MeasureChange;
use super::phi_table::PhiTable;
use super::policy::Policy;

fn check_point(problem: &Problem, t: f64, lam: f64, n_paths: usize) -> Result<()> {
    let horizon = problem.params.horizon;
    if !(lam > 0.0) || !lam.is_finite() {
        return Err(Error::Domain(format!("intensity must be positive, got {lam}")));
    }
    if !(0.0..=horizon).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, {horizon}]")));
    }
    if n_paths == 0 {
        return Err(Error::Domain("n_paths must be positive".into()));
    }
    Ok(())
}

/// `φ(t, λ)` under `policy` by direct simulation, using the coupled scheme so
/// that estimates at different `λ` with the same seed share random numbers.
pub fn estimate_phi(
    problem: &Problem,
    policy: &Policy,
    t: f64,
    lam: f64,
    n_paths: usize,
    seed: u64,
) -> Result<Estimate> {
    estimate_phi_with(problem, policy, Scheme::Coupled, t, lam, n_paths, seed)
}

/// As [`estimate_phi`] with an explicit simulation scheme. Path `i` uses seed `derive(seed, i)`.
pub fn estimate_phi_with(
    problem: &Problem,
    policy: &Policy,
    scheme: Scheme,
    t: f64,
    lam: f64,
    n_paths: usize,
    seed: u64,
) -> Result<Estimate> {
    check_point(problem, t, lam, n_paths)?;
    policy.validate(&problem.contract)?;
    if t == problem.params.horizon {
        return Ok(Estimate::exact(1.0, n_paths));
    }
    let ev = Evaluator::new(problem, policy);
    monte_carlo_scalar(n_paths, Vec::new, |buf, i| {
        simulate_into(scheme, &problem.params, t, lam, derive(seed, i), buf)?;
        Ok(ev.log_phi_sample(t, lam, buf).exp())
    })
}

/// `E[exp(-η ∫_t^T e^{r(T-s)} c_s ds)]`: a lower bound for `φ(t, λ)` under any strategy.
pub fn estimate_phi_lower_bound(problem: &Problem, t: f64, lam: f64, n_paths: usize, seed: u64) -> Result<Estimate> {
    check_point(problem, t, lam, n_paths)?;
    let p = &problem.params;
    let c_bar = problem.insurance_unit_rate();
    monte_carlo_scalar(n_paths, Vec::new, |buf, i| {
        simulate_into(Scheme::Coupled, p, t, lam, derive(seed, i), buf)?;
        let mut acc = 0.0;
        let (mut time, mut l) = (t, lam);
        for j in buf.iter().chain(std::iter::once(&JumpRecord::claim(p.horizon, 0.0))) {
            let h = j.time - time;
            let w = (p.r * (p.horizon - time)).exp();
            acc += w
                * (p.beta * crate::process::intensity::one_minus_exp_over(p.r, h)
                    + (l - p.beta) * crate::process::intensity::one_minus_exp_over(p.r + p.alpha, h));
            l = decay(p, l, h) + j.intensity_jump(p);
            time = j.time;
        }
        Ok((-p.eta * c_bar * acc).exp())
    })
}

/// Jumps on `(t, T]` under the reference measure: claims at unit rate with
/// marks from the claim law, external shocks at rate ρ.
pub(crate) fn simulate_reference(params: &ModelParams, t: f64, seed: u64, out: &mut Vec<JumpRecord>) {
    out.clear();
    let mut rng = stream(seed);
    let mut next_claim = t + exp1(&mut rng);
    let mut next_ext = if params.rho > 0.0 {
        t + exp1(&mut rng) / params.rho
    } else {
        f64::INFINITY
    };
    loop {
        if next_claim.min(next_ext) > params.horizon {
            return;
        }
        if next_claim < next_ext {
            out.push(JumpRecord::claim(next_claim, params.claim_dist.sample(&mut rng)));
            next_claim += exp1(&mut rng);
        } else {
            out.push(JumpRecord::external(next_ext, params.ext_dist.sample(&mut rng)));
            next_ext += exp1(&mut rng) / params.rho;
        }
    }
}

/// `φ(t, λ)` through the reference-measure representation (deterministic
/// policies only). Path `i` uses seed `derive(seed, i)`.
pub fn estimate_phi_q(
    problem: &Problem,
    policy: &Policy,
    t: f64,
    lam: f64,
    n_paths: usize,
    seed: u64,
) -> Result<Estimate> {
    check_point(problem, t, lam, n_paths)?;
    let mc = MeasureChange::new(problem, policy)?;
    if t == problem.params.horizon {
        return Ok(Estimate::exact(1.0, n_paths));
    }
    monte_carlo_scalar(n_paths, Vec::new, |buf, i| {
        simulate_reference(&problem.params, t, derive(seed, i), buf);
        Ok(mc.log_weight(t, lam, buf).exp())
    })
}

/// Estimates `φ` on every grid cell. Row `i` uses seed `derive(seed, i)` for
/// all its cells, so each row is coupled across `λ`; the row `t = T` is 1.
pub fn estimate_phi_table(
    problem: &Problem,
    policy: &Policy,
    grid: &Grid,
    n_paths: usize,
    seed: u64,
    scheme: Scheme,
) -> Result<PhiTable> {
    grid.validate()?;
    if *grid.times.last().expect("validated") > problem.params.horizon {
        return Err(Error::Domain("t grid extends beyond the horizon".into()));
    }
    let cells = map_indexed(grid.len(), |k| {
        let (i, j) = (k / grid.n_lambda(), k % grid.n_lambda());
        estimate_phi_with(
            problem,
            policy,
            scheme,
            grid.times[i],
            grid.lambdas[j],
            n_paths,
            derive(seed, i as u64),
        )
        .map_err(|e| match e {
            Error::Numeric(m) => Error::Numeric(format!("cell (t={}, lambda={}): {m}", grid.times[i], grid.lambdas[j])),
            other => other,
        })
    });
    let mut values = Vec::with_capacity(grid.len());
    let mut stderr = Vec::with_capacity(grid.len());
    for c in cells {
        let e = c?;
        values.push(e.mean);
        stderr.push(e.stderr);
    }
    PhiTable::new(grid.clone(), values, stderr)
}

/// Closed-form `φ(t, β)` for constant intensity (ρ = 0, ℓ ≡ 0, λ0 = β, r = 0)
/// and a constant policy: `exp{(T-t)[-η β (c̄ - d(u)) + β (E e^{ηΦ(Z,u)} - 1)]}`.
pub fn phi_closed_form_poisson(problem: &Problem, u: f64, t: f64) -> Result<f64> {
    let p = &problem.params;
    if p.rho != 0.0 || !p.self_excitation.is_zero() || p.lambda0 != p.beta || p.r != 0.0 {
        return Err(Error::Domain(
            "closed form needs rho = 0, zero self-excitation, lambda0 = beta and r = 0".into(),
        ));
    }
    problem.contract.check_control(u)?;
    if !(0.0..=p.horizon).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, {}]", p.horizon)));
    }
    let net = problem.insurance_unit_rate() - problem.reinsurance_unit_rate(u);
    let rate = -p.eta * p.beta * net + p.beta * (problem.exp_retained(u, p.eta) - 1.0);
    Ok((rate * (p.horizon - t)).exp())
}

/// Closed-form `φ(t, λ)` when the intensity is deterministic (ρ = 0, ℓ ≡ 0)
/// and the policy constant: `exp ∫_t^T λ_s g(s) ds` with
/// `g(s) = -η e^{r(T-s)}(c̄ - d(u)) + E e^{η e^{r(T-s)} Φ(Z,u)} - 1`.
pub fn phi_deterministic_intensity(problem: &Problem, u: f64, t: f64, lam: f64) -> Result<f64> {
    let p = &problem.params;
    if p.rho != 0.0 || !p.self_excitation.is_zero() {
        return Err(Error::Domain(
            "deterministic-intensity formula needs rho = 0 and zero self-excitation".into(),
        ));
    }
    check_point(problem, t, lam, 1)?;
    problem.contract.check_control(u)?;
    let net = problem.insurance_unit_rate() - problem.reinsurance_unit_rate(u);
    let h = p.horizon - t;
    let exponent = if p.r == 0.0 {
        let g = -p.eta * net + problem.exp_retained(u, p.eta) - 1.0;
        g * compensator_unchecked(p, lam, h)
    } else {
        gl128().integrate(t, p.horizon, |s| {
            let w = p.risk_weight(s);
            decay(p, lam, s - t) * (-w * net + problem.exp_retained(u, w) - 1.0)
        })
    };
    Ok(exponent.exp())
}

/// `v(t, x, λ) = e^{-η x e^{r(T-t)}} φ(t, λ)`.
pub fn value_function(params: &ModelParams, t: f64, x: f64, phi_value: f64) -> Result<f64> {
    if !(phi_value > 0.0) {
        return Err(Error::Domain(format!("phi must be positive, got {phi_value}")));
    }
    Ok((-params.risk_weight(t) * x).exp() * phi_value)
}
