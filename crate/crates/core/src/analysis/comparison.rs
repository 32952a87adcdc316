//! Policy-level comparison `u*(t, λ) <= u*,cox(t) + tol`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::optimizer::{cox_optimal, PolicyTable};
use crate::problem::Problem;
use crate::process::fmt17;

/// How the monotonicity precondition of the comparison was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precondition {
    /// The deterministic sufficient condition holds.
    Strana,
    /// The coupled Monte Carlo test found no significant decrease.
    Coupled,
    /// Neither check passed; the comparison result is reported but not backed.
    Unverified,
}

impl Precondition {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Strana => "strana",
            Self::Coupled => "coupled",
            Self::Unverified => "unverified-precondition",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub t: f64,
    pub lambda: f64,
    pub u_star: f64,
    pub u_cox: f64,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub tolerance: f64,
    pub violations: usize,
    pub precondition: Precondition,
}

impl ComparisonReport {
    /// CSV with columns `t,lambda,u_star,u_cox,violation`.
    pub fn to_csv(&self, comment: Option<&str>) -> String {
        let mut out = String::new();
        crate::table_io::write_comment(&mut out, comment);
        out.push_str("t,lambda,u_star,u_cox,violation\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt17(r.t),
                fmt17(r.lambda),
                fmt17(r.u_star),
                fmt17(r.u_cox),
                r.violation
            );
        }
        out
    }

    pub fn violating(&self) -> impl Iterator<Item = &ComparisonRow> {
        self.rows.iter().filter(|r| r.violation)
    }
}

/// Flags every cell where `u*(t, λ) > cox(t) + tol`.
pub fn compare_policies<F: Fn(f64) -> f64>(table: &PolicyTable, cox_curve: F, tol: f64) -> ComparisonReport {
    let g = &table.grid;
    let mut rows = Vec::with_capacity(g.len());
    for (i, &t) in g.times.iter().enumerate() {
        let u_cox = cox_curve(t);
        for (j, &lambda) in g.lambdas.iter().enumerate() {
            let u_star = table.at(i, j);
            rows.push(ComparisonRow {
                t,
                lambda,
                u_star,
                u_cox,
                violation: u_star > u_cox + tol,
            });
        }
    }
    let violations = rows.iter().filter(|r| r.violation).count();
    ComparisonReport {
        rows,
        tolerance: tol,
        violations,
        precondition: Precondition::Unverified,
    }
}

/// Compares a strategy table for `problem` with the Cox-optimal strategy of
/// the ℓ ≡ 0 twin. Only the expected value principle is supported.
pub fn compare_with_cox(
    problem: &Problem,
    table: &PolicyTable,
    tol: f64,
    precondition: Precondition,
) -> Result<ComparisonReport> {
    if !problem.principle.is_expected_value() {
        return Err(Error::Unsupported(format!(
            "strategy comparison is stated for the expected value principle, got {}",
            problem.principle
        )));
    }
    if table.contract != problem.contract {
        return Err(Error::Config(format!(
            "policy table was built for {} but the problem uses {}",
            table.contract, problem.contract
        )));
    }
    let twin = problem.cox_twin();
    let mut cox = Vec::with_capacity(table.grid.n_t());
    for &t in &table.grid.times {
        cox.push(cox_optimal(t, &twin)?.u);
    }
    let times = &table.grid.times;
    let mut report = compare_policies(table, |t| cox[times.partition_point(|&x| x < t)], tol);
    report.precondition = precondition;
    Ok(report)
}
