//! Rectangular `(t, λ)` grids with bilinear interpolation.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub times: Vec<f64>,
    pub lambdas: Vec<f64>,
}

impl Grid {
    pub fn new(times: Vec<f64>, lambdas: Vec<f64>) -> Result<Self> {
        let g = Self { times, lambdas };
        g.validate()?;
        Ok(g)
    }

    /// `n_t` equally spaced times on `[0, horizon]` and `n_lambda` equally
    /// spaced intensities on `[lam_min, lam_max]`.
    pub fn uniform(horizon: f64, n_t: usize, lam_min: f64, lam_max: f64, n_lambda: usize) -> Result<Self> {
        if n_t < 2 || n_lambda < 2 {
            return Err(Error::Domain(format!(
                "grid needs at least 2 points per axis, got {n_t}x{n_lambda}"
            )));
        }
        Self::new(linspace(0.0, horizon, n_t), linspace(lam_min, lam_max, n_lambda))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, axis) in [("t", &self.times), ("lambda", &self.lambdas)] {
            if axis.is_empty() {
                return Err(Error::Structural(format!("{name} grid is empty")));
            }
            if axis.iter().any(|x| !x.is_finite()) || axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Structural(format!(
                    "{name} grid must be finite and strictly increasing"
                )));
            }
        }
        if self.lambdas[0] <= 0.0 {
            return Err(Error::Structural("lambda grid must be positive".into()));
        }
        if self.times[0] < 0.0 {
            return Err(Error::Structural("t grid must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn n_t(&self) -> usize {
        self.times.len()
    }

    pub fn n_lambda(&self) -> usize {
        self.lambdas.len()
    }

    pub fn len(&self) -> usize {
        self.n_t() * self.n_lambda()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major index of `(t_i, λ_j)`.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_lambda() + j
    }

    /// Bilinear interpolation of row-major `values`, flat outside the grid.
    pub fn interpolate(&self, values: &[f64], t: f64, lam: f64) -> f64 {
        let (i, wt) = bracket(&self.times, t);
        let (j, wl) = bracket(&self.lambdas, lam);
        let n = self.n_lambda();
        let v = |a: usize, b: usize| values[a * n + b];
        let i1 = (i + 1).min(self.n_t() - 1);
        let j1 = (j + 1).min(n - 1);
        let lo = v(i, j) + wl * (v(i, j1) - v(i, j));
        let hi = v(i1, j) + wl * (v(i1, j1) - v(i1, j));
        lo + wt * (hi - lo)
    }

    /// Linear interpolation along the λ axis within row `i`, flat outside.
    pub fn interpolate_row(&self, values: &[f64], i: usize, lam: f64) -> f64 {
        let (j, w) = bracket(&self.lambdas, lam);
        let n = self.n_lambda();
        let row = &values[i * n..(i + 1) * n];
        let j1 = (j + 1).min(n - 1);
        row[j] + w * (row[j1] - row[j])
    }
}

/// `(k, w)` with `x ≈ (1-w) xs[k] + w xs[k+1]`; `w` is clamped to `[0, 1]`.
#[inline]
pub fn bracket(xs: &[f64], x: f64) -> (usize, f64) {
    let n = xs.len();
    if n == 1 || x <= xs[0] {
        return (0, 0.0);
    }
    if x >= xs[n - 1] {
        return (n - 1, 0.0);
    }
    let k = xs.partition_point(|&v| v <= x) - 1;
    (k, (x - xs[k]) / (xs[k + 1] - xs[k]))
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|k| {
            if k + 1 == n {
                b
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}
