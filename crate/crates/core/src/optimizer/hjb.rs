//! Residual of the reduced HJB equation on a tabulated `(φ, u)` pair.

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::valuation::PhiTable;

use super::table::PolicyTable;

/// Second-order first derivative on a non-uniform three-point stencil.
fn central(xm: f64, x0: f64, xp: f64, fm: f64, f0: f64, fp: f64) -> f64 {
    let (hm, hp) = (x0 - xm, xp - x0);
    (hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f0) / (hm * hp * (hm + hp))
}

/// Signed residual at the interior node `(t_i, λ_j)` of
///
/// ```text
/// ∂φ/∂t + α(β-λ) ∂φ/∂λ + ρ ∫[φ(t,λ+z) - φ] F2(dz) - κ c φ
///   + κ q(u) φ + λ ∫[φ(t,λ+ℓ(z)) e^{κΦ(z,u)} - φ] F1(dz),   κ = η e^{r(T-t)},
/// ```
///
/// with `u` read from `policy`. Derivatives are central differences; jump
/// integrals interpolate `φ` linearly in `λ`, flat above the grid.
pub fn hjb_residual(problem: &Problem, phi: &PhiTable, policy: &PolicyTable, i: usize, j: usize) -> Result<f64> {
    let g = &phi.grid;
    if i == 0 || j == 0 || i + 1 >= g.n_t() || j + 1 >= g.n_lambda() {
        return Err(Error::Domain(format!("({i}, {j}) is not an interior grid node")));
    }
    let p = &problem.params;
    let (t, lam) = (g.times[i], g.lambdas[j]);
    let f0 = phi.at(i, j);
    let phi_t = central(
        g.times[i - 1],
        t,
        g.times[i + 1],
        phi.at(i - 1, j),
        f0,
        phi.at(i + 1, j),
    );
    let phi_l = central(
        g.lambdas[j - 1],
        lam,
        g.lambdas[j + 1],
        phi.at(i, j - 1),
        f0,
        phi.at(i, j + 1),
    );
    let kappa = p.risk_weight(t);
    let u = policy.control(t, lam);
    let c = &problem.contract;

    let ext = if p.rho > 0.0 {
        p.rho * p.ext_dist.expect(&[], |z| phi.interpolate_row(i, lam + z) - f0)
    } else {
        0.0
    };
    let mut breaks = c.kinks(u);
    breaks.retain(|x| x.is_finite());
    let claims = lam
        * problem.claims().expect(&breaks, |z| {
            phi.interpolate_row(i, lam + p.self_excitation.eval(z)) * (kappa * c.retained(z, u)).exp() - f0
        });
    let premium = kappa * lam * (problem.reinsurance_unit_rate(u) - problem.insurance_unit_rate()) * f0;
    Ok(phi_t + p.alpha * (p.beta - lam) * phi_l + ext + premium + claims)
}
