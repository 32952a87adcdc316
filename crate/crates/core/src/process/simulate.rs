//! Path simulation of the dynamic contagion process.
//!
//! Three schemes produce the same law:
//!
//! * [`Scheme::Exact`]: competing clocks. The next claim time solves
//!   `∫ λ = E` with `E ~ Exp(1)`, inverting the closed-form compensator.
//! * [`Scheme::Thinning`]: Ogata thinning under the piecewise-constant
//!   majorant `max(λ_s, β)`, which dominates the intensity until the next jump.
//! * [`Scheme::Coupled`]: thinning of a fixed Poisson random measure on
//!   time × height. Claims are the atoms lying under the curve `λ_{s-}`.
//!   Paths with the same seed but different initial intensities are coupled
//!   monotonically: the larger start keeps a larger intensity and a superset
//!   of the claims, with identical marks.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{derive, exp1, stream, PathRng};
use crate::roots::{invert_increasing, NewtonSettings};

use super::intensity::{compensator_unchecked, decay};
use super::params::ModelParams;
use super::path::{JumpRecord, PathRecord};

/// Height of one band of the Poisson random measure used by [`Scheme::Coupled`].
const BAND_HEIGHT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Scheme {
    Exact,
    /// Thinning with majorant `max(λ, β)·(1 + margin)`, `margin >= 0`.
    Thinning {
        margin: f64,
    },
    #[default]
    Coupled,
}

/// Simulates on `[0, T]` from `λ0` by compensator inversion.
pub fn simulate_exact(params: &ModelParams, seed: u64) -> Result<PathRecord> {
    simulate(Scheme::Exact, params, 0.0, params.lambda0, seed)
}

/// Simulates on `[0, T]` from `λ0` by Ogata thinning.
pub fn simulate_thinning(params: &ModelParams, seed: u64, majorant_margin: f64) -> Result<PathRecord> {
    simulate(
        Scheme::Thinning {
            margin: majorant_margin,
        },
        params,
        0.0,
        params.lambda0,
        seed,
    )
}

/// Simulates on `(start, T]` from intensity `lam` at `start`.
pub fn simulate(scheme: Scheme, params: &ModelParams, start: f64, lam: f64, seed: u64) -> Result<PathRecord> {
    let mut jumps = Vec::new();
    simulate_into(scheme, params, start, lam, seed, &mut jumps)?;
    Ok(PathRecord {
        params: params.clone(),
        start,
        initial_intensity: lam,
        jumps,
        seed,
        horizon: params.horizon,
    })
}

/// As [`simulate`], writing the jumps into a caller-owned buffer (cleared first).
pub fn simulate_into(
    scheme: Scheme,
    params: &ModelParams,
    start: f64,
    lam: f64,
    seed: u64,
    out: &mut Vec<JumpRecord>,
) -> Result<()> {
    out.clear();
    if !(lam > 0.0) || !lam.is_finite() {
        return Err(Error::Domain(format!("initial intensity must be positive, got {lam}")));
    }
    if !(start <= params.horizon) || start < 0.0 {
        return Err(Error::Domain(format!(
            "start time {start} outside [0, {}]",
            params.horizon
        )));
    }
    match scheme {
        Scheme::Exact => run_exact(params, start, lam, &mut stream(seed), out),
        Scheme::Thinning { margin } => {
            if !(margin >= 0.0) || !margin.is_finite() {
                return Err(Error::Domain(format!("majorant margin must be >= 0, got {margin}")));
            }
            run_thinning(params, start, lam, margin, &mut stream(seed), out);
            Ok(())
        }
        Scheme::Coupled => {
            run_coupled(params, start, lam, seed, out);
            Ok(())
        }
    }
}

/// Smallest float strictly above `s` (for `s >= 0`).
fn after(s: f64, t: f64) -> f64 {
    if t > s {
        t
    } else {
        f64::from_bits(s.to_bits() + 1)
    }
}

fn next_external<R: Rng>(params: &ModelParams, s: f64, rng: &mut R) -> f64 {
    if params.rho > 0.0 {
        s + exp1(rng) / params.rho
    } else {
        f64::INFINITY
    }
}

/// Time `h` after which the compensator started at `lam` reaches `target`.
pub(crate) fn invert_compensator(params: &ModelParams, lam: f64, target: f64) -> Result<f64> {
    let root = invert_increasing(
        |h| compensator_unchecked(params, lam, h),
        |h| decay(params, lam, h),
        target,
        target / lam,
        NewtonSettings::default(),
    )
    .map_err(|e| Error::Numeric(format!("compensator inversion from lambda={lam}, target={target}: {e}")))?;
    Ok(root.x)
}

fn run_exact(params: &ModelParams, start: f64, lam0: f64, rng: &mut PathRng, out: &mut Vec<JumpRecord>) -> Result<()> {
    let horizon = params.horizon;
    let mut s = start;
    let mut lam = lam0;
    let mut next_ext = next_external(params, s, rng);
    let mut clock = exp1(rng);
    loop {
        let window_end = next_ext.min(horizon);
        let h_max = window_end - s;
        let mass = compensator_unchecked(params, lam, h_max);
        if mass < clock {
            if next_ext <= horizon {
                clock -= mass;
                let z = params.ext_dist.sample(rng);
                lam = decay(params, lam, h_max) + z;
                s = next_ext;
                out.push(JumpRecord::external(s, z));
                next_ext = next_external(params, s, rng);
                continue;
            }
            return Ok(());
        }
        let h = invert_compensator(params, lam, clock)?.min(h_max);
        let tau = after(s, s + h);
        let left = decay(params, lam, tau - s);
        let z = params.claim_dist.sample(rng);
        lam = left + params.self_excitation.eval(z);
        s = tau;
        out.push(JumpRecord::claim(s, z));
        clock = exp1(rng);
    }
}

fn run_thinning(
    params: &ModelParams,
    start: f64,
    lam0: f64,
    margin: f64,
    rng: &mut PathRng,
    out: &mut Vec<JumpRecord>,
) {
    let horizon = params.horizon;
    let mut s = start;
    let mut lam = lam0;
    let mut next_ext = next_external(params, s, rng);
    loop {
        let bound = lam.max(params.beta) * (1.0 + margin);
        let cand = s + exp1(rng) / bound;
        if next_ext <= cand.min(horizon) {
            let z = params.ext_dist.sample(rng);
            lam = decay(params, lam, next_ext - s) + z;
            s = next_ext;
            out.push(JumpRecord::external(s, z));
            next_ext = next_external(params, s, rng);
            continue;
        }
        if cand > horizon {
            return;
        }
        let cand = after(s, cand);
        let lam_c = decay(params, lam, cand - s);
        let u: f64 = rng.random();
        if u * bound <= lam_c {
            let z = params.claim_dist.sample(rng);
            lam = lam_c + params.self_excitation.eval(z);
            out.push(JumpRecord::claim(cand, z));
        } else {
            lam = lam_c;
        }
        s = cand;
    }
}

/// Lazily generated atoms of one horizontal band of the driving Poisson measure.
struct Band {
    rng: PathRng,
    floor: f64,
    time: f64,
    height: f64,
    mark: f64,
}

impl Band {
    fn new(params: &ModelParams, seed: u64, index: usize, start: f64) -> Self {
        let rng = stream(derive(seed, index as u64 + 1));
        let mut band = Self {
            rng,
            floor: index as f64 * BAND_HEIGHT,
            time: start,
            height: 0.0,
            mark: 0.0,
        };
        band.advance(params);
        band
    }

    fn advance(&mut self, params: &ModelParams) {
        self.time += exp1(&mut self.rng) / BAND_HEIGHT;
        self.height = self.floor + BAND_HEIGHT * self.rng.random::<f64>();
        self.mark = params.claim_dist.sample(&mut self.rng);
    }
}

fn run_coupled(params: &ModelParams, start: f64, lam0: f64, seed: u64, out: &mut Vec<JumpRecord>) {
    let horizon = params.horizon;
    let mut ext_rng = stream(derive(seed, 0));
    let mut bands: Vec<Band> = Vec::new();
    let mut s = start;
    let mut lam = lam0;
    let mut next_ext = next_external(params, s, &mut ext_rng);

    let ensure = |bands: &mut Vec<Band>, bound: f64, now: f64| {
        let need = (bound / BAND_HEIGHT).ceil().max(1.0) as usize;
        while bands.len() < need {
            let mut b = Band::new(params, seed, bands.len(), start);
            // atoms before `now` sit above the intensity curve seen so far
            while b.time <= now {
                b.advance(params);
            }
            bands.push(b);
        }
    };
    ensure(&mut bands, lam.max(params.beta), s);

    loop {
        let (idx, cand) = bands
            .iter()
            .enumerate()
            .map(|(i, b)| (i, b.time))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one band");
        if next_ext <= cand.min(horizon) {
            let z = params.ext_dist.sample(&mut ext_rng);
            lam = decay(params, lam, next_ext - s) + z;
            s = next_ext;
            out.push(JumpRecord::external(s, z));
            next_ext = next_external(params, s, &mut ext_rng);
            ensure(&mut bands, lam.max(params.beta), s);
            continue;
        }
        if cand > horizon {
            return;
        }
        let lam_c = decay(params, lam, cand - s);
        let band = &mut bands[idx];
        if band.height <= lam_c {
            let z = band.mark;
            lam = lam_c + params.self_excitation.eval(z);
            out.push(JumpRecord::claim(cand, z));
        } else {
            lam = lam_c;
        }
        s = cand;
        band.advance(params);
        ensure(&mut bands, lam.max(params.beta), s);
    }
}
