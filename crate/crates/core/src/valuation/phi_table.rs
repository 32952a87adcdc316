//! Tabulated reduced value function `φ(t, λ)`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::process::fmt17;
use crate::table_io::{axes_from_rows, parse_f64, read_rows, write_comment};

/// `φ` with per-cell standard errors on a `(t, λ)` grid. Interpolation is
/// bilinear inside the grid and flat outside.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiTable {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl PhiTable {
    pub fn new(grid: Grid, values: Vec<f64>, stderr: Vec<f64>) -> Result<Self> {
        let t = Self { grid, values, stderr };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.values.len() != self.grid.len() || self.stderr.len() != self.grid.len() {
            return Err(Error::Structural("phi table size does not match its grid".into()));
        }
        for (k, (&v, &s)) in self.values.iter().zip(&self.stderr).enumerate() {
            if !(v > 0.0 && v.is_finite() && s >= 0.0) {
                let (i, j) = (k / self.grid.n_lambda(), k % self.grid.n_lambda());
                return Err(Error::Numeric(format!(
                    "phi({}, {}) = {v} (stderr {s}) is not a positive finite value",
                    self.grid.times[i], self.grid.lambdas[j]
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn interpolate(&self, t: f64, lam: f64) -> f64 {
        self.grid.interpolate(&self.values, t, lam)
    }

    /// Linear interpolation along the λ axis of row `i`.
    #[inline]
    pub fn interpolate_row(&self, i: usize, lam: f64) -> f64 {
        self.grid.interpolate_row(&self.values, i, lam)
    }

    /// CSV with columns `t,lambda,phi,stderr`.
    pub fn to_csv(&self, comment: Option<&str>) -> String {
        let mut out = String::new();
        write_comment(&mut out, comment);
        out.push_str("t,lambda,phi,stderr\n");
        for (i, &t) in self.grid.times.iter().enumerate() {
            for (j, &l) in self.grid.lambdas.iter().enumerate() {
                let k = self.grid.index(i, j);
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt17(t),
                    fmt17(l),
                    fmt17(self.values[k]),
                    fmt17(self.stderr[k])
                );
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = read_rows(text, &["t", "lambda", "phi", "stderr"])?;
        let mut cols = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
        for r in &rows {
            for (c, (field, name)) in cols.iter_mut().zip(r.iter().zip(["t", "lambda", "phi", "stderr"])) {
                c.push(parse_f64(field, name)?);
            }
        }
        let [ts, ls, values, stderr] = cols;
        let (times, lambdas) = axes_from_rows(&ts, &ls)?;
        Self::new(Grid::new(times, lambdas)?, values, stderr)
    }
}
