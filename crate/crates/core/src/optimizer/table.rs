//! Strategy tables `u*(t, λ)`.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::contracts::RetentionContract;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::process::fmt17;
use crate::table_io::{axes_from_rows, parse_f64, read_rows, write_comment};

/// Which branch of the three-region characterisation produced a control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// Maximal reinsurance, `u = u_M`.
    A0,
    /// Interior root of the first-order condition.
    Interior,
    /// Null reinsurance, `u = u_N`.
    A1,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::A0 => "A0",
            Self::Interior => "interior",
            Self::A1 => "A1",
        }
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A0" => Ok(Self::A0),
            "interior" => Ok(Self::Interior),
            "A1" => Ok(Self::A1),
            _ => Err(Error::Structural(format!("unknown region '{s}'"))),
        }
    }
}

/// Strategy on a `(t, λ)` grid, bilinearly interpolated in between and held
/// flat outside.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTable {
    pub grid: Grid,
    /// Row-major `u(t_i, λ_j)`.
    pub values: Vec<f64>,
    pub regions: Vec<Region>,
    pub contract: RetentionContract,
}

impl PolicyTable {
    pub fn new(grid: Grid, values: Vec<f64>, regions: Vec<Region>, contract: RetentionContract) -> Result<Self> {
        let t = Self {
            grid,
            values,
            regions,
            contract,
        };
        t.validate()?;
        Ok(t)
    }

    /// A table equal to `u(t)` in every λ column.
    pub fn from_time_function<F: FnMut(f64) -> Result<(f64, Region)>>(
        grid: Grid,
        contract: RetentionContract,
        mut f: F,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        let mut regions = Vec::with_capacity(grid.len());
        for &t in &grid.times {
            let (u, reg) = f(t)?;
            for _ in 0..grid.n_lambda() {
                values.push(u);
                regions.push(reg);
            }
        }
        Self::new(grid, values, regions, contract)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.values.len() != self.grid.len() || self.regions.len() != self.grid.len() {
            return Err(Error::Structural(format!(
                "policy table has {} values / {} regions for a {}x{} grid",
                self.values.len(),
                self.regions.len(),
                self.grid.n_t(),
                self.grid.n_lambda()
            )));
        }
        for (k, &u) in self.values.iter().enumerate() {
            if self.contract.check_control(u).is_err() || u > self.contract.upper() {
                let (i, j) = (k / self.grid.n_lambda(), k % self.grid.n_lambda());
                return Err(Error::Domain(format!(
                    "policy value {u} at (t={}, lambda={}) outside the control domain",
                    self.grid.times[i], self.grid.lambdas[j]
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn control(&self, t: f64, lam: f64) -> f64 {
        self.grid.interpolate(&self.values, t, lam)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// `max |u - other.u|` over the grid.
    pub fn sup_distance(&self, other: &PolicyTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Whether every row is constant in λ.
    pub fn is_lambda_constant(&self) -> bool {
        let n = self.grid.n_lambda();
        self.values.chunks(n).all(|row| row.iter().all(|&u| u == row[0]))
    }

    /// CSV with columns `t,lambda,u_star,region`.
    pub fn to_csv(&self, comment: Option<&str>) -> String {
        let mut out = String::new();
        write_comment(&mut out, comment);
        out.push_str("t,lambda,u_star,region\n");
        for (i, &t) in self.grid.times.iter().enumerate() {
            for (j, &l) in self.grid.lambdas.iter().enumerate() {
                let k = self.grid.index(i, j);
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt17(t),
                    fmt17(l),
                    fmt17(self.values[k]),
                    self.regions[k].as_str()
                );
            }
        }
        out
    }

    pub fn from_csv(text: &str, contract: RetentionContract) -> Result<Self> {
        let rows = read_rows(text, &["t", "lambda", "u_star", "region"])?;
        let mut ts = Vec::new();
        let mut ls = Vec::new();
        let mut values = Vec::new();
        let mut regions = Vec::new();
        for r in &rows {
            ts.push(parse_f64(r[0], "t")?);
            ls.push(parse_f64(r[1], "lambda")?);
            values.push(parse_f64(r[2], "u_star")?);
            regions.push(r[3].parse()?);
        }
        let (times, lambdas) = axes_from_rows(&ts, &ls)?;
        Self::new(Grid::new(times, lambdas)?, values, regions, contract)
    }
}
