use reinsure_core::analysis::{
    compare_policies, compare_with_cox, coupled_monotonicity, monotonicity_probe, strana_check, Precondition,
};
use reinsure_core::grid::{linspace, Grid};
use reinsure_core::optimizer::cox_table;
use reinsure_core::process::{MarkDistribution, ModelParams, SelfExcitation};
use reinsure_core::{Error, Policy, PolicyTable, PremiumPrinciple, Problem, RetentionContract};

const U01: MarkDistribution = MarkDistribution::Uniform { a: 0.0, b: 1.0 };

fn params(alpha: f64, ell: SelfExcitation) -> ModelParams {
    ModelParams {
        alpha,
        beta: 1.0,
        lambda0: 1.0,
        rho: 0.5,
        r: 0.0,
        eta: 1.0,
        horizon: 1.0,
        claim_dist: U01,
        ext_dist: U01,
        self_excitation: ell,
        unsafe_moments: false,
    }
}

fn evp(theta_i: f64, theta_r: f64) -> PremiumPrinciple {
    PremiumPrinciple::ExpectedValue { theta_i, theta_r }
}

/// Composite Simpson rule with `n` (even) panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn balanced_premiums_without_self_excitation_pass_trivially() {
    // full proportional cover with equal loadings: c̄ = d(0), so a ≡ 1 and B ≡ 1
    let pb = Problem::new(
        params(1.0, SelfExcitation::Zero),
        RetentionContract::proportional(),
        evp(0.2, 0.2),
    )
    .unwrap();
    let rep = strana_check(&pb, &Policy::Constant(0.0), &linspace(0.0, 1.0, 11), 1e-12).unwrap();
    assert!(rep.passed);
    for &(_, m) in &rep.rows {
        assert!(m.abs() < 1e-14, "{m}");
    }
}

#[test]
fn margin_at_horizon_has_no_memory_term() {
    let pb = Problem::new(
        params(1.0, SelfExcitation::Linear(1.0)),
        RetentionContract::proportional(),
        evp(0.2, 0.2),
    )
    .unwrap();
    let rep = strana_check(&pb, &Policy::Constant(0.5), &[1.0], 0.0).unwrap();
    // ∫ e^{z/2} dz − a with a = 1 + 1.2·0.5 − 1.2·0.5·0.5
    let oracle = 2.0 * (0.5f64.exp() - 1.0) - 1.3;
    assert!((rep.rows[0].1 - oracle).abs() < 1e-13);
}

#[test]
fn margin_matches_quadrature_oracle() {
    let pb = Problem::new(
        params(1.0, SelfExcitation::Linear(1.0)),
        RetentionContract::proportional(),
        evp(0.2, 0.2),
    )
    .unwrap();
    let ts = linspace(0.0, 1.0, 6);
    let rep = strana_check(&pb, &Policy::Constant(0.5), &ts, 1e-9).unwrap();
    let a = 1.0 + 1.2 * 0.5 - 1.2 * 0.5 * 0.5;
    for (&t, &(rt, m)) in ts.iter().zip(&rep.rows) {
        assert_eq!(t, rt);
        let big_a = simpson(|s| a * (-(s - t)).exp(), t, 1.0, 512);
        let oracle = simpson(|z| (0.5 * z - big_a * z).exp(), 0.0, 1.0, 512) - a;
        assert!((m - oracle).abs() < 1e-10, "t={t}: {m} vs {oracle}");
    }
    assert!(!rep.passed);
    assert_eq!(
        rep.min_margin,
        rep.rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min)
    );
    let csv = rep.to_csv(Some("config_sha256=x"));
    assert!(csv.starts_with("# config_sha256=x\nt,margin,pass\n"));
    assert!(csv.lines().nth(2).unwrap().ends_with(",false"));
}

#[test]
fn strana_check_rejects_state_dependent_policies() {
    let pb = Problem::new(
        params(1.0, SelfExcitation::Linear(1.0)),
        RetentionContract::proportional(),
        evp(0.2, 0.2),
    )
    .unwrap();
    let grid = Grid::uniform(1.0, 3, 1.0, 2.0, 3).unwrap();
    let table = cox_table(&pb, &grid).unwrap();
    assert!(matches!(
        strana_check(&pb, &Policy::Table(table), &[0.0], 0.0),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn coupled_difference_vanishes_in_trivial_cases() {
    let pb = Problem::new(
        params(2.0, SelfExcitation::Linear(1.0)),
        RetentionContract::proportional(),
        evp(0.1, 0.3),
    )
    .unwrap();
    let pol = Policy::Constant(0.5);
    let same = coupled_monotonicity(&pb, &pol, 0.2, 1.5, 1.5, 500, 1).unwrap();
    assert_eq!((same.mean, same.stderr), (0.0, 0.0));
    let end = coupled_monotonicity(&pb, &pol, 1.0, 1.0, 3.0, 500, 1).unwrap();
    assert_eq!((end.mean, end.stderr), (0.0, 0.0));
    assert!(matches!(
        coupled_monotonicity(&pb, &pol, 0.2, 2.0, 1.0, 10, 1),
        Err(Error::Domain(_))
    ));
}

#[test]
fn strana_passing_configuration_is_monotone_on_probe_grid() {
    // cheap cover (θ_R > θ_I) and fast decay keep every margin positive
    let pb = Problem::new(
        params(4.0, SelfExcitation::Linear(1.0)),
        RetentionContract::proportional(),
        evp(0.1, 0.5),
    )
    .unwrap();
    let pol = Policy::Constant(0.1);
    let ts = linspace(0.0, 1.0, 5);
    let rep = strana_check(&pb, &pol, &linspace(0.0, 1.0, 41), 0.0).unwrap();
    assert!(rep.passed, "{rep:?}");
    let probes = monotonicity_probe(&pb, &pol, &ts, &[1.0, 1.5, 2.0, 3.0, 4.0], 2000, 9).unwrap();
    assert_eq!(probes.probes.len(), 25);
    assert!(probes.passed, "{probes:?}");
    assert!(probes
        .probes
        .iter()
        .filter(|p| p.t < 1.0)
        .all(|p| p.difference.mean > 0.0));
    assert!(probes
        .to_csv(None)
        .starts_with("t,lambda1,lambda2,difference,stderr,pass\n"));
}

fn layer_problem(ell: SelfExcitation, principle: PremiumPrinciple) -> Problem {
    Problem::new(
        params(2.0, ell),
        RetentionContract::limited_xl(0.5, &U01).unwrap(),
        principle,
    )
    .unwrap()
}

#[test]
fn identical_tables_have_no_violations() {
    let pb = layer_problem(SelfExcitation::Zero, evp(0.1, 0.3));
    let grid = Grid::uniform(1.0, 6, 1.0, 3.0, 4).unwrap();
    let cox = cox_table(&pb, &grid).unwrap();
    let rep = compare_policies(&cox, |t| cox.control(t, 1.0), 0.0);
    assert_eq!(rep.violations, 0);
    assert_eq!(rep.precondition, Precondition::Unverified);
    assert!(rep.to_csv(None).starts_with("t,lambda,u_star,u_cox,violation\n"));
}

#[test]
fn cox_against_its_own_twin_has_no_violations() {
    let pb = layer_problem(SelfExcitation::Zero, evp(0.1, 0.3));
    let grid = Grid::uniform(1.0, 6, 1.0, 3.0, 4).unwrap();
    let cox = cox_table(&pb, &grid).unwrap();
    let rep = compare_with_cox(&pb, &cox, 0.0, Precondition::Strana).unwrap();
    assert_eq!(rep.violations, 0);
    assert_eq!(rep.precondition.as_str(), "strana");
}

#[test]
fn perturbed_table_is_flagged() {
    let pb = layer_problem(SelfExcitation::Linear(1.0), evp(0.1, 0.3));
    let grid = Grid::uniform(1.0, 6, 1.0, 3.0, 4).unwrap();
    let cox = cox_table(&pb, &grid).unwrap();
    let bumped = PolicyTable::new(
        grid.clone(),
        cox.values.iter().map(|u| u + 0.1).collect(),
        cox.regions.clone(),
        cox.contract,
    )
    .unwrap();
    let rep = compare_with_cox(&pb, &bumped, 1e-4, Precondition::Unverified).unwrap();
    assert_eq!(rep.violations, grid.len());
    assert_eq!(rep.violating().count(), grid.len());
    assert_eq!(rep.precondition.as_str(), "unverified-precondition");
}

#[test]
fn comparison_needs_expected_value_premiums() {
    let pb = layer_problem(
        SelfExcitation::Linear(1.0),
        PremiumPrinciple::Variance { eta_i: 0.1, eta_r: 0.2 },
    );
    let grid = Grid::uniform(1.0, 3, 1.0, 2.0, 3).unwrap();
    let table = cox_table(&pb, &grid).unwrap();
    assert!(matches!(
        compare_with_cox(&pb, &table, 1e-4, Precondition::Coupled),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn comparison_rejects_contract_mismatch() {
    let pb = layer_problem(SelfExcitation::Linear(1.0), evp(0.1, 0.3));
    let other = Problem::new(
        params(2.0, SelfExcitation::Zero),
        RetentionContract::proportional(),
        evp(0.1, 0.3),
    )
    .unwrap();
    let grid = Grid::uniform(1.0, 3, 1.0, 2.0, 3).unwrap();
    let table = cox_table(&other, &grid).unwrap();
    assert!(matches!(
        compare_with_cox(&pb, &table, 1e-4, Precondition::Coupled),
        Err(Error::Config(_))
    ));
}
