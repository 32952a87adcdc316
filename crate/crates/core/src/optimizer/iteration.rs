//! Policy iteration: alternate Monte Carlo valuation of the current strategy
//! with pointwise improvement through the first-order condition.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::mc::map_indexed;
use crate::problem::Problem;
use crate::process::{fmt17, Scheme};
use crate::valuation::{estimate_phi_table, PhiTable, Policy};

use super::cox::cox_optimal;
use super::foc::{FocSpec, TableRatio};
use super::table::{PolicyTable, Region};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationSettings {
    pub n_paths: usize,
    pub seed: u64,
    pub scheme: Scheme,
    pub max_iterations: usize,
    /// Stop when `sup |u^{k+1} - u^k| <= tolerance`.
    pub tolerance: f64,
}

impl IterationSettings {
    pub fn new(n_paths: usize, seed: u64) -> Self {
        Self {
            n_paths,
            seed,
            scheme: Scheme::Coupled,
            max_iterations: 50,
            tolerance: 1e-4,
        }
    }
}

/// Per-iteration diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub sup_delta: f64,
    pub a0_cells: usize,
    pub interior_cells: usize,
    pub a1_cells: usize,
}

impl IterationRecord {
    pub fn to_json(&self) -> String {
        format!(
            "{{\"iteration\":{},\"sup_delta\":{},\"a0\":{},\"interior\":{},\"a1\":{}}}",
            self.iteration,
            fmt17(self.sup_delta),
            self.a0_cells,
            self.interior_cells,
            self.a1_cells
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationOutcome {
    pub policy: PolicyTable,
    /// `φ` of the strategy the returned policy was derived from.
    pub phi: PhiTable,
    pub history: Vec<IterationRecord>,
    pub converged: bool,
}

impl IterationOutcome {
    /// Diagnostics as JSON lines, one per iteration.
    pub fn diagnostics_jsonl(&self) -> String {
        let mut s = String::new();
        for r in &self.history {
            let _ = writeln!(s, "{}", r.to_json());
        }
        s
    }
}

/// Cox strategy tabulated on `grid` (constant along λ).
pub fn cox_table(problem: &Problem, grid: &Grid) -> Result<PolicyTable> {
    PolicyTable::from_time_function(grid.clone(), problem.contract, |t| {
        let c = cox_optimal(t, problem)?;
        Ok((c.u, c.region))
    })
}

/// One improvement step: the FOC solution at every cell with `φ`-ratios from `phi`.
pub fn improve(problem: &Problem, phi: &PhiTable) -> Result<PolicyTable> {
    let grid = &phi.grid;
    let ratio = TableRatio { table: phi };
    let foc = FocSpec::new(problem, &ratio);
    let cells = map_indexed(grid.len(), |k| {
        let (i, j) = (k / grid.n_lambda(), k % grid.n_lambda());
        foc.solve(grid.times[i], grid.lambdas[j])
    });
    let mut values = Vec::with_capacity(grid.len());
    let mut regions = Vec::with_capacity(grid.len());
    for c in cells {
        let c = c?;
        values.push(c.u);
        regions.push(c.region);
    }
    PolicyTable::new(grid.clone(), values, regions, problem.contract)
}

/// Policy iteration from the Cox strategy. Seeds are fixed per grid row and
/// reused in every iteration, so the improvement map is deterministic.
pub fn policy_iteration(problem: &Problem, grid: &Grid, settings: &IterationSettings) -> Result<IterationOutcome> {
    grid.validate()?;
    let p = &problem.params;
    if grid.lambdas[0] < p.intensity_floor() {
        return Err(Error::Domain(format!(
            "lambda grid starts at {} below the intensity floor {}",
            grid.lambdas[0],
            p.intensity_floor()
        )));
    }
    if grid.times[0] != 0.0 || *grid.times.last().expect("validated") != p.horizon {
        return Err(Error::Domain(format!("t grid must span [0, {}]", p.horizon)));
    }
    let mut current = cox_table(problem, grid)?;
    let mut history = Vec::new();
    let mut best: Option<(f64, PolicyTable, PhiTable)> = None;
    for iteration in 1..=settings.max_iterations.max(1) {
        let phi = estimate_phi_table(
            problem,
            &Policy::Table(current.clone()),
            grid,
            settings.n_paths,
            settings.seed,
            settings.scheme,
        )?;
        let next = improve(problem, &phi)?;
        let delta = next.sup_distance(&current);
        let count = |r: Region| next.regions.iter().filter(|&&x| x == r).count();
        history.push(IterationRecord {
            iteration,
            sup_delta: delta,
            a0_cells: count(Region::A0),
            interior_cells: count(Region::Interior),
            a1_cells: count(Region::A1),
        });
        if delta <= settings.tolerance {
            return Ok(IterationOutcome {
                policy: next,
                phi,
                history,
                converged: true,
            });
        }
        if best.as_ref().is_none_or(|b| delta < b.0) {
            best = Some((delta, next.clone(), phi));
        }
        current = next;
    }
    let (_, policy, phi) = best.expect("at least one iteration");
    Ok(IterationOutcome {
        policy,
        phi,
        history,
        converged: false,
    })
}
