//! The five commands. Each writes its artifacts into the output directory and
//! returns a [`Summary`]; artifacts depend only on the config text, the seed
//! and the command, never on the worker count.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use reinsure_core::analysis::{compare_with_cox, monotonicity_probe, strana_check, Precondition};
use reinsure_core::grid::linspace;
use reinsure_core::optimizer::{cox_optimal, policy_iteration, IterationOutcome};
use reinsure_core::process::{ks_exponential, pooled_time_change_increments, simulate};
use reinsure_core::rng::derive;
use reinsure_core::valuation::estimate_phi_table;
use reinsure_core::{Policy, TimeCurve};

use crate::config::{PolicyKey, Scenario, FOC_TOLERANCE};
use crate::error::{CliError, CliResult};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "CONTAGION_OUT";

/// Significance level of the time-change test reported by `simulate`.
const KS_LEVEL: f64 = 0.01;

/// Path budget of `simulate` while collecting claims for the time-change test.
const MAX_SIMULATED_PATHS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Phi,
    Optimize,
    Compare,
    Check,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Phi => "phi",
            Self::Optimize => "optimize",
            Self::Compare => "compare",
            Self::Check => "check",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "simulate" => Ok(Self::Simulate),
            "phi" => Ok(Self::Phi),
            "optimize" => Ok(Self::Optimize),
            "compare" => Ok(Self::Compare),
            "check" => Ok(Self::Check),
            _ => Err(CliError::Validation(format!("unknown command '{s}'"))),
        }
    }
}

/// Everything a run needs besides the scenario.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    /// Worker threads; `None` uses the machine's parallelism.
    pub workers: Option<usize>,
    /// Overrides `grid.seed`.
    pub seed: Option<u64>,
}

/// Ordered `key=value` results of a run, also written to `summary.txt`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub entries: Vec<(String, String)>,
}

impl Summary {
    fn push(&mut self, key: &str, value: impl fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Loads the config, resolves the output directory and runs `command` on a
/// dedicated thread pool.
pub fn run(command: Command, config_path: &Path, opts: &RunOptions) -> CliResult<Summary> {
    let mut scenario = Scenario::load(config_path)?;
    if let Some(seed) = opts.seed {
        scenario.config.grid.seed = seed;
    }
    let out = resolve_out(opts.out.as_deref(), &scenario)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Validation(format!("--workers: {e}")))?;
    pool.install(|| run_scenario(command, &scenario, &out))
}

fn resolve_out(flag: Option<&Path>, scenario: &Scenario) -> CliResult<PathBuf> {
    if let Some(p) = flag {
        return Ok(p.to_path_buf());
    }
    if let Some(p) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        return Ok(PathBuf::from(p));
    }
    scenario
        .config
        .run
        .out
        .clone()
        .ok_or_else(|| CliError::Validation(format!("no output directory: pass --out, set {OUT_ENV} or set run.out")))
}

/// Runs `command` for an already parsed scenario, writing into `out`.
pub fn run_scenario(command: Command, scenario: &Scenario, out: &Path) -> CliResult<Summary> {
    fs::create_dir_all(out)?;
    let writer = Artifacts {
        dir: out,
        header: header(command, scenario),
    };
    let mut summary = Summary::default();
    summary.push("command", command);
    summary.push("config_sha256", &scenario.config_sha256);
    summary.push("seed", scenario.seed());
    match command {
        Command::Simulate => simulate_cmd(scenario, &writer, &mut summary)?,
        Command::Phi => phi_cmd(scenario, &writer, &mut summary)?,
        Command::Optimize => {
            optimize(scenario, &writer, &mut summary)?;
        }
        Command::Compare => compare_cmd(scenario, &writer, &mut summary)?,
        Command::Check => check_cmd(scenario, &writer, &mut summary)?,
    }
    writer.write("summary.txt", &summary.to_string())?;
    Ok(summary)
}

fn header(command: Command, scenario: &Scenario) -> String {
    format!(
        "config_sha256={} seed={} command={command}",
        scenario.config_sha256,
        scenario.seed()
    )
}

struct Artifacts<'a> {
    dir: &'a Path,
    header: String,
}

impl Artifacts<'_> {
    fn write(&self, name: &str, text: &str) -> CliResult<()> {
        fs::write(self.dir.join(name), text)?;
        Ok(())
    }

    fn comment(&self) -> Option<&str> {
        Some(&self.header)
    }
}

fn simulate_cmd(s: &Scenario, w: &Artifacts<'_>, summary: &mut Summary) -> CliResult<()> {
    let p = &s.problem.params;
    let run = &s.config.run;
    let mut paths = Vec::new();
    let mut claims = 0;
    while claims < run.ks_min_claims || paths.len() < run.write_paths {
        let path = simulate(s.scheme, p, 0.0, p.lambda0, derive(s.seed(), paths.len() as u64))?;
        claims += path.claim_count();
        paths.push(path);
        if paths.len() >= MAX_SIMULATED_PATHS && claims < run.ks_min_claims {
            return Err(CliError::Numeric(format!(
                "only {claims} claims after {} paths; lower run.ks_min_claims",
                paths.len()
            )));
        }
    }
    for (i, path) in paths.iter().take(run.write_paths).enumerate() {
        w.write(&format!("path_{i:04}.csv"), &path.to_csv(w.comment()))?;
    }
    let ks = ks_exponential(&pooled_time_change_increments(&paths))?;
    let pass = ks.p_value > KS_LEVEL;
    let mut csv = String::new();
    csv.push_str(&format!("# {}\n", w.header));
    csv.push_str("paths,claims,statistic,p_value,pass\n");
    csv.push_str(&format!(
        "{},{},{},{},{}\n",
        paths.len(),
        ks.n,
        reinsure_core::process::fmt17(ks.statistic),
        reinsure_core::process::fmt17(ks.p_value),
        pass
    ));
    w.write("time_change.csv", &csv)?;
    summary.push("paths", paths.len());
    summary.push("claims", ks.n);
    summary.push("ks_statistic", ks.statistic);
    summary.push("ks_p_value", ks.p_value);
    summary.push("ks_pass", pass);
    Ok(())
}

/// The fixed policy named by `run.policy`.
fn fixed_policy(s: &Scenario) -> CliResult<Policy> {
    match s.config.run.policy {
        PolicyKey::Constant(u) => {
            s.problem
                .contract
                .check_control(u)
                .map_err(|e| CliError::Validation(format!("run.policy: {e}")))?;
            Ok(Policy::Constant(u))
        }
        PolicyKey::Cox => {
            let twin = s.problem.cox_twin();
            let curve = TimeCurve::sample(s.grid.times.clone(), |t| Ok(cox_optimal(t, &twin)?.u))?;
            Ok(Policy::TimeCurve(curve))
        }
    }
}

fn phi_cmd(s: &Scenario, w: &Artifacts<'_>, summary: &mut Summary) -> CliResult<()> {
    let policy = fixed_policy(s)?;
    let phi = estimate_phi_table(&s.problem, &policy, &s.grid, s.config.grid.n_paths, s.seed(), s.scheme)?;
    w.write("phi.csv", &phi.to_csv(w.comment()))?;
    summary.push("cells", s.grid.len());
    summary.push("phi_min", phi.values.iter().copied().fold(f64::INFINITY, f64::min));
    summary.push("phi_max", phi.values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    Ok(())
}

fn optimize(s: &Scenario, w: &Artifacts<'_>, summary: &mut Summary) -> CliResult<IterationOutcome> {
    let outcome = policy_iteration(&s.problem, &s.grid, &s.iteration_settings())?;
    w.write("policy.csv", &outcome.policy.to_csv(w.comment()))?;
    w.write("phi.csv", &outcome.phi.to_csv(w.comment()))?;
    w.write("diagnostics.jsonl", &outcome.diagnostics_jsonl())?;
    let last = outcome.history.last().expect("at least one iteration");
    summary.push("iterations", outcome.history.len());
    summary.push("converged", outcome.converged);
    summary.push("sup_delta", last.sup_delta);
    summary.push("a0_cells", last.a0_cells);
    summary.push("interior_cells", last.interior_cells);
    summary.push("a1_cells", last.a1_cells);
    summary.push("lambda_constant", outcome.policy.is_lambda_constant());
    Ok(outcome)
}

fn probe_axes(s: &Scenario) -> (Vec<f64>, Vec<f64>) {
    let run = &s.config.run;
    let g = &s.config.grid;
    let axis = |a: f64, b: f64, n: usize| if n == 1 { vec![a] } else { linspace(a, b, n) };
    (
        axis(0.0, s.problem.params.horizon, run.probe_times),
        axis(g.lambda_min, g.lambda_max, run.probe_lambdas),
    )
}

/// Seed for the monotonicity probes, disjoint from the per-row valuation seeds.
fn probe_seed(s: &Scenario) -> u64 {
    derive(s.seed(), 1 << 40)
}

fn compare_cmd(s: &Scenario, w: &Artifacts<'_>, summary: &mut Summary) -> CliResult<()> {
    if !s.problem.principle.is_expected_value() {
        return Err(CliError::Validation(format!(
            "premium.principle: the strategy comparison needs the expected value principle, got {}",
            s.problem.principle
        )));
    }
    let outcome = optimize(s, w, summary)?;
    let (times, lambdas) = probe_axes(s);
    let probes = monotonicity_probe(
        &s.problem,
        &Policy::Table(outcome.policy.clone()),
        &times,
        &lambdas,
        s.config.run.probe_paths,
        probe_seed(s),
    )?;
    w.write("monotonicity.csv", &probes.to_csv(w.comment()))?;
    let precondition = if probes.passed {
        Precondition::Coupled
    } else {
        Precondition::Unverified
    };
    let tol = s.config.run.compare_tolerance + FOC_TOLERANCE;
    let report = compare_with_cox(&s.problem, &outcome.policy, tol, precondition)?;
    w.write("comparison.csv", &report.to_csv(w.comment()))?;
    let max_excess = report
        .rows
        .iter()
        .map(|r| r.u_star - r.u_cox)
        .fold(f64::NEG_INFINITY, f64::max);
    summary.push("precondition", report.precondition.as_str());
    summary.push("tolerance", tol);
    summary.push("violations", report.violations);
    summary.push("max_excess", max_excess);
    Ok(())
}

fn check_cmd(s: &Scenario, w: &Artifacts<'_>, summary: &mut Summary) -> CliResult<()> {
    let policy = fixed_policy(s)?;
    let run = &s.config.run;
    let t_grid = linspace(0.0, s.problem.params.horizon, run.strana_points.max(2));
    let strana = strana_check(&s.problem, &policy, &t_grid, run.strana_tolerance)?;
    w.write("strana.csv", &strana.to_csv(w.comment()))?;
    let (times, lambdas) = probe_axes(s);
    let probes = monotonicity_probe(&s.problem, &policy, &times, &lambdas, run.probe_paths, probe_seed(s))?;
    w.write("monotonicity.csv", &probes.to_csv(w.comment()))?;
    summary.push("strana_pass", strana.passed);
    summary.push("strana_min_margin", strana.min_margin);
    summary.push("probes", probes.probes.len());
    summary.push("probes_pass", probes.passed);
    Ok(())
}
