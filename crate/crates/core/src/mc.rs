//! Deterministic Monte Carlo driver.
//!
//! Paths are grouped into fixed-size chunks. Each chunk is reduced with
//! Welford's recurrence and the chunk summaries are merged in chunk order, so
//! the result does not depend on how many threads executed the chunks.

use crate::error::{Error, Result};

/// Paths per chunk; part of the reproducibility contract.
pub const CHUNK: usize = 256;

/// Sample mean with its standard error `s / √n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_paths: usize,
}

impl Estimate {
    /// A value known without sampling error.
    pub fn exact(value: f64, n_paths: usize) -> Self {
        Self {
            mean: value,
            stderr: 0.0,
            n_paths,
        }
    }

    /// `|self - other| / sqrt(se1² + se2²)` for independent estimates;
    /// zero when both are exact and equal.
    pub fn z_score(&self, other: &Estimate) -> f64 {
        let se = self.stderr.hypot(other.stderr);
        let d = (self.mean - other.mean).abs();
        if d == 0.0 {
            0.0
        } else {
            d / se
        }
    }

    /// `|self - value| / stderr`.
    pub fn z_against(&self, value: f64) -> f64 {
        let d = (self.mean - value).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * (self.n as f64 * o.n as f64 / n as f64);
        self.n = n;
    }

    fn estimate(&self) -> Estimate {
        let stderr = if self.n > 1 {
            (self.m2.max(0.0) / (self.n - 1) as f64 / self.n as f64).sqrt()
        } else {
            0.0
        };
        Estimate {
            mean: self.mean,
            stderr,
            n_paths: self.n,
        }
    }
}

/// Runs `n_paths` evaluations of `f(state, path_index, out)`, each filling
/// `out` with `width` outputs, and returns one [`Estimate`] per output.
///
/// `init` builds per-chunk scratch state (e.g. a reusable jump buffer).
pub fn monte_carlo<S, I, F>(n_paths: usize, width: usize, init: I, f: F) -> Result<Vec<Estimate>>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, u64, &mut [f64]) -> Result<()> + Sync,
{
    if n_paths == 0 {
        return Err(Error::Domain("n_paths must be positive".into()));
    }
    let n_chunks = n_paths.div_ceil(CHUNK);
    let run_chunk = |c: usize| -> Result<Vec<Moments>> {
        let mut state = init();
        let mut acc = vec![Moments::default(); width];
        let mut out = vec![0.0; width];
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n_paths);
        for i in lo..hi {
            f(&mut state, i as u64, &mut out)?;
            for (m, &x) in acc.iter_mut().zip(&out) {
                if !x.is_finite() {
                    return Err(Error::Numeric(format!("non-finite sample {x} on path {i}")));
                }
                m.push(x);
            }
        }
        Ok(acc)
    };
    let chunks: Vec<Result<Vec<Moments>>> = map_chunks(n_chunks, run_chunk);
    let mut total = vec![Moments::default(); width];
    for chunk in chunks {
        for (t, m) in total.iter_mut().zip(&chunk?) {
            t.merge(m);
        }
    }
    Ok(total.iter().map(Moments::estimate).collect())
}

/// Single-output convenience wrapper around [`monte_carlo`].
pub fn monte_carlo_scalar<S, I, F>(n_paths: usize, init: I, f: F) -> Result<Estimate>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, u64) -> Result<f64> + Sync,
{
    let v = monte_carlo(n_paths, 1, init, |s, i, out| {
        out[0] = f(s, i)?;
        Ok(())
    })?;
    Ok(v[0])
}

/// Maps `f` over `0..n` preserving order, in parallel when enabled.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    map_chunks(n, f)
}

#[cfg(feature = "parallel")]
fn map_chunks<T: Send, F: Fn(usize) -> T + Sync>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(&f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_chunks<T: Send, F: Fn(usize) -> T + Sync>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}
