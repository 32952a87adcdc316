//! Scalar root finding.

use crate::error::{Error, Result};

/// Outcome of a root search, with the iteration count for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub iterations: usize,
}

/// Bisection for a function that is `>= 0` left of the root and `< 0` right of it.
///
/// Runs until the bracket cannot be split further in floating point, so the
/// result is the root to full f64 resolution. Returns the midpoint of the
/// final bracket.
pub fn bisect_decreasing<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64) -> Result<Root> {
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Numeric(format!("invalid bisection bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut iterations = 0;
    while iterations < 2000 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm.is_nan() {
            return Err(Error::Numeric(format!(
                "NaN in bisection at x={m} (bracket [{a}, {b}])"
            )));
        }
        if fm >= 0.0 {
            a = m;
        } else {
            b = m;
        }
        iterations += 1;
    }
    Ok(Root {
        x: 0.5 * (a + b),
        iterations,
    })
}

/// Settings for [`invert_increasing`].
#[derive(Debug, Clone, Copy)]
pub struct NewtonSettings {
    /// Absolute tolerance on |g(x) - target|.
    pub tol: f64,
    /// Newton steps that fail to shrink the residual before switching to bisection.
    pub max_stalls: usize,
    pub max_iter: usize,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_stalls: 8,
            max_iter: 500,
        }
    }
}

/// Solves `g(x) = target` for a strictly increasing `g` on `[0, ∞)` with `g(0) = 0`.
///
/// Newton from `x0`; once `max_stalls` steps fail to contract the residual (or
/// a step leaves `[0, ∞)`), falls back to bisection on `[0, x_ub]`, where
/// `x_ub` is doubled until `g(x_ub) >= target`. `dg` returns the derivative.
pub fn invert_increasing<G, D>(mut g: G, mut dg: D, target: f64, x0: f64, settings: NewtonSettings) -> Result<Root>
where
    G: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    if target <= 0.0 {
        return Ok(Root { x: 0.0, iterations: 0 });
    }
    let mut x = x0.max(0.0);
    let mut resid = g(x) - target;
    let mut stalls = 0;
    let mut iterations = 0;
    while iterations < settings.max_iter {
        if resid.abs() <= settings.tol {
            return Ok(Root { x, iterations });
        }
        let slope = dg(x);
        let next = x - resid / slope;
        iterations += 1;
        if !(next >= 0.0) || !next.is_finite() {
            stalls = settings.max_stalls;
        } else {
            let r = g(next) - target;
            if r.abs() >= resid.abs() {
                stalls += 1;
            } else {
                stalls = 0;
            }
            x = next;
            resid = r;
        }
        if stalls >= settings.max_stalls {
            break;
        }
    }
    if resid.abs() <= settings.tol {
        return Ok(Root { x, iterations });
    }
    // Bisection fallback.
    let mut hi = x0.max(f64::MIN_POSITIVE).max(x);
    let mut doublings = 0;
    while g(hi) < target {
        hi *= 2.0;
        doublings += 1;
        if doublings > 1100 || !hi.is_finite() {
            return Err(Error::Numeric(format!(
                "could not bracket g(x) = {target}; last upper bound {hi}"
            )));
        }
    }
    let mut lo = 0.0;
    while iterations < settings.max_iter + 2000 {
        let m = 0.5 * (lo + hi);
        let r = g(m) - target;
        iterations += 1;
        if r.abs() <= settings.tol || m <= lo || m >= hi {
            return Ok(Root { x: m, iterations });
        }
        if r < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    Err(Error::Numeric(format!(
        "root search did not converge: target={target}, bracket=[{lo}, {hi}], iterations={iterations}"
    )))
}
