//! Minimal CSV reading and writing for the tabular artifacts.
//!
//! Lines starting with `#` are comments. The first non-comment line is the
//! header; all remaining lines are data rows with the same number of fields.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub(crate) fn write_comment(out: &mut String, comment: Option<&str>) {
    if let Some(c) = comment {
        for line in c.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
}

/// Parses `text`, checks the header against `expected`, returns the rows.
pub(crate) fn read_rows<'a>(text: &'a str, expected: &[&str]) -> Result<Vec<Vec<&'a str>>> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Structural("CSV has no header row".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != expected {
        return Err(Error::Structural(format!(
            "CSV header {cols:?} differs from expected {expected:?}"
        )));
    }
    lines
        .enumerate()
        .map(|(k, line)| {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != expected.len() {
                return Err(Error::Structural(format!(
                    "CSV row {} has {} fields, expected {}",
                    k + 1,
                    fields.len(),
                    expected.len()
                )));
            }
            Ok(fields)
        })
        .collect()
}

pub(crate) fn parse_f64(field: &str, what: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| Error::Structural(format!("cannot parse {what} '{field}' as a number")))
}

/// Recovers a strictly increasing axis from a row-major column.
pub(crate) fn axes_from_rows(ts: &[f64], ls: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut times: Vec<f64> = Vec::new();
    for &t in ts {
        if times.last() != Some(&t) {
            times.push(t);
        }
    }
    let n_l = ts.iter().take_while(|&&t| t == ts[0]).count();
    let lambdas = ls[..n_l].to_vec();
    if times.len() * n_l != ts.len() {
        return Err(Error::Structural("CSV rows do not form a rectangular grid".into()));
    }
    for (k, (&t, &l)) in ts.iter().zip(ls).enumerate() {
        if t != times[k / n_l] || l != lambdas[k % n_l] {
            return Err(Error::Structural(format!("CSV row {} is out of grid order", k + 1)));
        }
    }
    Ok((times, lambdas))
}
