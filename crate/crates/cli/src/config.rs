//! Scenario configuration: a sectioned TOML file, validated in full before
//! any computation starts. Unknown keys are rejected.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use reinsure_core::grid::Grid;
use reinsure_core::optimizer::IterationSettings;
use reinsure_core::process::{MarkDistribution, ModelParams, Scheme, SelfExcitation};
use reinsure_core::{PremiumPrinciple, Problem, RetentionContract};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Slack added to the comparison tolerance for the first-order root, which
/// is bisected to full double resolution.
pub const FOC_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelSection,
    pub contract: ContractSection,
    pub premium: PremiumSection,
    pub grid: GridSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub alpha: f64,
    pub beta: f64,
    pub lambda0: f64,
    pub rho: f64,
    #[serde(default)]
    pub r: f64,
    pub eta: f64,
    pub horizon: f64,
    /// e.g. `"uniform(0,1)"`, `"truncexp(1.5,3)"`, `"point(0.8)"`.
    pub claim_dist: String,
    pub ext_dist: String,
    /// `"zero"`, `"constant(a)"` or `"linear(a)"`.
    pub self_excitation: String,
    #[serde(default)]
    pub unsafe_moments: bool,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ContractKindKey {
    Proportional,
    ExcessOfLoss,
    LimitedXl,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractSection {
    pub kind: ContractKindKey,
    /// Layer width; required for `limited_xl` only.
    pub coverage: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PrincipleKey {
    ExpectedValue,
    Variance,
    MeanVariance,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PremiumSection {
    pub principle: PrincipleKey,
    pub theta_i: Option<f64>,
    pub theta_r: Option<f64>,
    pub eta_i: Option<f64>,
    pub eta_r: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n_t: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub n_lambda: usize,
    /// Monte Carlo paths per grid cell.
    pub n_paths: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    /// Output directory, used when neither `--out` nor the environment gives one.
    pub out: Option<PathBuf>,
    /// `"coupled"`, `"exact"` or `"thinning"`.
    pub scheme: String,
    pub thinning_margin: f64,
    /// `simulate`: number of path CSVs written.
    pub write_paths: usize,
    /// `simulate`: minimum number of claims in the time-change test.
    pub ks_min_claims: usize,
    /// `phi` and `check`: `"cox"` or a constant retention level.
    pub policy: PolicyKey,
    pub max_iterations: usize,
    pub tolerance: f64,
    /// `compare`: allowed excess of `u*` over the Cox strategy, before the
    /// first-order root slack is added.
    pub compare_tolerance: f64,
    pub strana_tolerance: f64,
    pub strana_points: usize,
    pub probe_paths: usize,
    pub probe_times: usize,
    pub probe_lambdas: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            out: None,
            scheme: "coupled".into(),
            thinning_margin: 0.1,
            write_paths: 5,
            ks_min_claims: 10_000,
            policy: PolicyKey::Cox,
            max_iterations: 50,
            tolerance: 1e-4,
            compare_tolerance: 1e-4,
            strana_tolerance: 1e-9,
            strana_points: 21,
            probe_paths: 2000,
            probe_times: 5,
            probe_lambdas: 5,
        }
    }
}

/// A fixed strategy for `phi` and `check`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(try_from = "RawPolicy")]
pub enum PolicyKey {
    Constant(f64),
    Cox,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawPolicy {
    Number(f64),
    Name(String),
}

impl TryFrom<RawPolicy> for PolicyKey {
    type Error = String;

    fn try_from(raw: RawPolicy) -> Result<Self, String> {
        match raw {
            RawPolicy::Number(u) => Ok(Self::Constant(u)),
            RawPolicy::Name(s) if s == "cox" => Ok(Self::Cox),
            RawPolicy::Name(s) => Err(format!("run.policy: expected \"cox\" or a number, got \"{s}\"")),
        }
    }
}

/// A parsed, validated scenario together with the hash of its source text.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub problem: Problem,
    pub grid: Grid,
    pub scheme: Scheme,
    pub config_sha256: String,
}

impl Scenario {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let config: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        let config_sha256 = hex::encode(Sha256::digest(text.as_bytes()));
        let problem = build_problem(&config)?;
        let grid = build_grid(&config, &problem)?;
        let scheme = build_scheme(&config.run)?;
        validate_run(&config.run)?;
        Ok(Self {
            config,
            problem,
            grid,
            scheme,
            config_sha256,
        })
    }

    pub fn seed(&self) -> u64 {
        self.config.grid.seed
    }

    pub fn iteration_settings(&self) -> IterationSettings {
        IterationSettings {
            n_paths: self.config.grid.n_paths,
            seed: self.seed(),
            scheme: self.scheme,
            max_iterations: self.config.run.max_iterations,
            tolerance: self.config.run.tolerance,
        }
    }
}

fn key_error(key: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{key}: {e}"))
}

fn parse_key<T: FromStr>(key: &str, s: &str) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    T::from_str(s).map_err(|e| key_error(key, e))
}

fn required(key: &str, v: Option<f64>) -> CliResult<f64> {
    v.ok_or_else(|| CliError::Validation(format!("{key} is required")))
}

fn forbid(key: &str, v: Option<f64>, why: &str) -> CliResult<()> {
    match v {
        Some(_) => Err(CliError::Validation(format!("{key} is not used {why}"))),
        None => Ok(()),
    }
}

fn build_problem(c: &ScenarioConfig) -> CliResult<Problem> {
    let m = &c.model;
    let params = ModelParams {
        alpha: m.alpha,
        beta: m.beta,
        lambda0: m.lambda0,
        rho: m.rho,
        r: m.r,
        eta: m.eta,
        horizon: m.horizon,
        claim_dist: parse_key::<MarkDistribution>("model.claim_dist", &m.claim_dist)?,
        ext_dist: parse_key::<MarkDistribution>("model.ext_dist", &m.ext_dist)?,
        self_excitation: parse_key::<SelfExcitation>("model.self_excitation", &m.self_excitation)?,
        unsafe_moments: m.unsafe_moments,
    };
    params.validate()?;

    let contract = match c.contract.kind {
        ContractKindKey::Proportional => {
            forbid("contract.coverage", c.contract.coverage, "by a proportional treaty")?;
            RetentionContract::proportional()
        }
        ContractKindKey::ExcessOfLoss => {
            forbid("contract.coverage", c.contract.coverage, "by an excess of loss treaty")?;
            RetentionContract::excess_of_loss(&params.claim_dist)
        }
        ContractKindKey::LimitedXl => {
            let coverage = required("contract.coverage", c.contract.coverage)?;
            RetentionContract::limited_xl(coverage, &params.claim_dist)
                .map_err(|e| key_error("contract.coverage", e))?
        }
    };

    let p = &c.premium;
    let principle = match p.principle {
        PrincipleKey::ExpectedValue => {
            forbid("premium.eta_i", p.eta_i, "under the expected value principle")?;
            forbid("premium.eta_r", p.eta_r, "under the expected value principle")?;
            PremiumPrinciple::ExpectedValue {
                theta_i: required("premium.theta_i", p.theta_i)?,
                theta_r: required("premium.theta_r", p.theta_r)?,
            }
        }
        PrincipleKey::Variance => {
            forbid("premium.theta_i", p.theta_i, "under the variance principle")?;
            forbid("premium.theta_r", p.theta_r, "under the variance principle")?;
            PremiumPrinciple::Variance {
                eta_i: required("premium.eta_i", p.eta_i)?,
                eta_r: required("premium.eta_r", p.eta_r)?,
            }
        }
        PrincipleKey::MeanVariance => PremiumPrinciple::MeanVariance {
            theta_i: required("premium.theta_i", p.theta_i)?,
            eta_i: required("premium.eta_i", p.eta_i)?,
            theta_r: required("premium.theta_r", p.theta_r)?,
            eta_r: required("premium.eta_r", p.eta_r)?,
        },
    };
    Ok(Problem::new(params, contract, principle)?)
}

fn build_grid(c: &ScenarioConfig, problem: &Problem) -> CliResult<Grid> {
    let g = &c.grid;
    if g.n_t < 2 || g.n_lambda < 2 {
        return Err(CliError::Validation(format!(
            "grid.n_t = {} and grid.n_lambda = {} must both be at least 2",
            g.n_t, g.n_lambda
        )));
    }
    if g.n_paths == 0 {
        return Err(CliError::Validation("grid.n_paths must be positive".into()));
    }
    let floor = problem.params.intensity_floor();
    if !(g.lambda_min >= floor) {
        return Err(CliError::Validation(format!(
            "grid.lambda_min = {} is below the intensity floor {floor}",
            g.lambda_min
        )));
    }
    if !(g.lambda_max > g.lambda_min) || !g.lambda_max.is_finite() {
        return Err(CliError::Validation(format!(
            "grid.lambda_max = {} must be finite and exceed grid.lambda_min = {}",
            g.lambda_max, g.lambda_min
        )));
    }
    Grid::uniform(problem.params.horizon, g.n_t, g.lambda_min, g.lambda_max, g.n_lambda)
        .map_err(|e| key_error("grid", e))
}

fn build_scheme(run: &RunSection) -> CliResult<Scheme> {
    match run.scheme.as_str() {
        "coupled" => Ok(Scheme::Coupled),
        "exact" => Ok(Scheme::Exact),
        "thinning" => {
            if !(run.thinning_margin >= 0.0) || !run.thinning_margin.is_finite() {
                return Err(CliError::Validation(format!(
                    "run.thinning_margin = {} must be finite and >= 0",
                    run.thinning_margin
                )));
            }
            Ok(Scheme::Thinning {
                margin: run.thinning_margin,
            })
        }
        other => Err(CliError::Validation(format!(
            "run.scheme = \"{other}\" is not one of \"coupled\", \"exact\", \"thinning\""
        ))),
    }
}

fn validate_run(run: &RunSection) -> CliResult<()> {
    let positive = [
        ("run.max_iterations", run.max_iterations),
        ("run.ks_min_claims", run.ks_min_claims),
        ("run.strana_points", run.strana_points),
        ("run.probe_paths", run.probe_paths),
        ("run.probe_times", run.probe_times),
        ("run.probe_lambdas", run.probe_lambdas),
    ];
    for (key, v) in positive {
        if v == 0 {
            return Err(CliError::Validation(format!("{key} must be positive")));
        }
    }
    let nonneg = [
        ("run.tolerance", run.tolerance),
        ("run.compare_tolerance", run.compare_tolerance),
        ("run.strana_tolerance", run.strana_tolerance),
    ];
    for (key, v) in nonneg {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(CliError::Validation(format!("{key} = {v} must be finite and >= 0")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const BASE: &str = r#"
[model]
alpha = 2.0
beta = 1.0
lambda0 = 1.0
rho = 0.5
eta = 1.0
horizon = 1.0
claim_dist = "uniform(0,1)"
ext_dist = "uniform(0,1)"
self_excitation = "linear(1)"

[contract]
kind = "limited_xl"
coverage = 0.5

[premium]
principle = "expected_value"
theta_i = 0.1
theta_r = 0.3

[grid]
n_t = 4
lambda_min = 1.0
lambda_max = 3.0
n_lambda = 3
n_paths = 100
seed = 7
"#;

    #[test]
    fn parses_base_config() {
        let s = Scenario::parse(BASE).unwrap();
        assert_eq!(s.grid.n_t(), 4);
        assert_eq!(s.problem.contract.to_string(), "limited_xl(coverage=0.5)");
        assert_eq!(s.scheme, Scheme::Coupled);
        assert_eq!(s.config.run.policy, PolicyKey::Cox);
        assert_eq!(s.config_sha256.len(), 64);
    }

    #[test]
    fn policy_key_accepts_number_or_cox() {
        let s = Scenario::parse(&format!("{BASE}\n[run]\npolicy = 0.25\n")).unwrap();
        assert_eq!(s.config.run.policy, PolicyKey::Constant(0.25));
        let e = Scenario::parse(&format!("{BASE}\n[run]\npolicy = \"best\"\n")).unwrap_err();
        assert!(matches!(e, CliError::Validation(_)));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = Scenario::parse(&BASE.replace("rho = 0.5", "rho = 0.5\nrhoo = 1")).unwrap_err();
        assert!(e.to_string().contains("rhoo"), "{e}");
    }

    #[test]
    fn errors_name_the_key() {
        let cases = [
            (BASE.replace("coverage = 0.5", ""), "contract.coverage"),
            (BASE.replace("theta_r = 0.3", "theta_r = -1"), "theta_r"),
            (
                BASE.replace("\"uniform(0,1)\"\next", "\"gamma(2)\"\next"),
                "model.claim_dist",
            ),
            (BASE.replace("lambda_min = 1.0", "lambda_min = 0.5"), "grid.lambda_min"),
            (BASE.replace("alpha = 2.0", "alpha = -2.0"), "alpha"),
            (format!("{BASE}\n[run]\nscheme = \"euler\"\n"), "run.scheme"),
            (
                BASE.replace("theta_r = 0.3", "theta_r = 0.3\neta_r = 0.1"),
                "premium.eta_r",
            ),
        ];
        for (text, key) in cases {
            let e = Scenario::parse(&text).unwrap_err();
            assert!(e.to_string().contains(key), "{key}: {e}");
            assert_eq!(e.exit_code(), 1);
        }
    }

    #[test]
    fn hash_tracks_the_source_text() {
        let a = Scenario::parse(BASE).unwrap();
        let b = Scenario::parse(&format!("{BASE}\n")).unwrap();
        assert_ne!(a.config_sha256, b.config_sha256);
        assert_eq!(a.config_sha256, Scenario::parse(BASE).unwrap().config_sha256);
    }
}
