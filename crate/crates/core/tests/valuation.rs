use reinsure_core::process::{simulate, MarkDistribution, ModelParams, Scheme, SelfExcitation};
use reinsure_core::valuation::{
    estimate_phi, estimate_phi_lower_bound, estimate_phi_q, estimate_phi_with, phi_closed_form_poisson,
    phi_deterministic_intensity, terminal_wealth, value_function,
};
use reinsure_core::{Policy, PremiumPrinciple, Problem, RetentionContract, TimeCurve};

const U01: MarkDistribution = MarkDistribution::Uniform { a: 0.0, b: 1.0 };

fn poisson_params(beta: f64, horizon: f64) -> ModelParams {
    ModelParams {
        alpha: 1.0,
        beta,
        lambda0: beta,
        rho: 0.0,
        r: 0.0,
        eta: 1.0,
        horizon,
        claim_dist: U01,
        ext_dist: U01,
        self_excitation: SelfExcitation::Zero,
        unsafe_moments: false,
    }
}

fn contagion_params() -> ModelParams {
    ModelParams {
        alpha: 2.0,
        beta: 1.0,
        lambda0: 1.0,
        rho: 0.5,
        r: 0.0,
        eta: 1.0,
        horizon: 1.0,
        claim_dist: U01,
        ext_dist: U01,
        self_excitation: SelfExcitation::Linear(1.0),
        unsafe_moments: false,
    }
}

fn evp(theta_i: f64, theta_r: f64) -> PremiumPrinciple {
    PremiumPrinciple::ExpectedValue { theta_i, theta_r }
}

fn contracts(dist: &MarkDistribution) -> Vec<RetentionContract> {
    vec![
        RetentionContract::proportional(),
        RetentionContract::excess_of_loss(dist),
        RetentionContract::limited_xl(0.5, dist).unwrap(),
    ]
}

#[test]
fn closed_form_poisson_reference_value() {
    let pb = Problem::new(
        poisson_params(2.0, 1.0),
        RetentionContract::proportional(),
        evp(0.2, 0.3),
    )
    .unwrap();
    let v = phi_closed_form_poisson(&pb, 1.0, 0.0).unwrap();
    let oracle = (-1.2 + 2.0 * (std::f64::consts::E - 2.0)).exp();
    assert!((v - oracle).abs() < 1e-14);
    // the commonly quoted 5-decimal value 1.26690 is off by one unit in the last place
    assert!((v - 1.26690).abs() < 2e-5);
    assert_eq!(phi_closed_form_poisson(&pb, 0.4, 1.0).unwrap(), 1.0);
}

#[test]
fn closed_form_full_reinsurance_has_no_claim_exposure() {
    let pb = Problem::new(
        poisson_params(2.0, 1.0),
        RetentionContract::proportional(),
        evp(0.2, 0.3),
    )
    .unwrap();
    // c - q = β E[Z] (θ_I - θ_R)
    let drift = 2.0 * 0.5 * (0.2 - 0.3);
    let v = phi_closed_form_poisson(&pb, 0.0, 0.5).unwrap();
    assert!((v - (-drift * 0.5f64).exp()).abs() < 1e-14);
}

#[test]
fn closed_form_rejects_non_degenerate_models() {
    let pb = Problem::new(contagion_params(), RetentionContract::proportional(), evp(0.2, 0.3)).unwrap();
    assert!(phi_closed_form_poisson(&pb, 1.0, 0.0).is_err());
}

#[test]
fn monte_carlo_matches_poisson_oracle_for_all_contracts() {
    let params = poisson_params(2.0, 1.0);
    for contract in contracts(&U01) {
        for u in [0.1, 0.5, contract.upper()] {
            let pb = Problem::new(params.clone(), contract, evp(0.2, 0.3)).unwrap();
            let oracle = phi_closed_form_poisson(&pb, u, 0.0).unwrap();
            let est = estimate_phi(&pb, &Policy::Constant(u), 0.0, 2.0, 100_000, 11).unwrap();
            assert!(est.z_against(oracle) <= 3.0, "{contract} u={u}: {est:?} vs {oracle}");
        }
    }
}

#[test]
fn schemes_agree_on_phi() {
    let pb = Problem::new(contagion_params(), RetentionContract::proportional(), evp(0.1, 0.3)).unwrap();
    let pol = Policy::Constant(0.5);
    let a = estimate_phi_with(&pb, &pol, Scheme::Exact, 0.0, 1.0, 40_000, 1).unwrap();
    let b = estimate_phi_with(&pb, &pol, Scheme::Thinning { margin: 0.0 }, 0.0, 1.0, 40_000, 2).unwrap();
    let c = estimate_phi_with(&pb, &pol, Scheme::Coupled, 0.0, 1.0, 40_000, 3).unwrap();
    assert!(
        a.z_score(&b) <= 3.0 && a.z_score(&c) <= 3.0 && b.z_score(&c) <= 3.0,
        "{a:?} {b:?} {c:?}"
    );
}

#[test]
fn reference_measure_estimator_agrees() {
    let configs = [
        (poisson_params(2.0, 1.0), 1.0, evp(0.2, 0.3)),
        (contagion_params(), 0.5, evp(0.1, 0.3)),
    ];
    for (params, u, principle) in configs {
        let lam = params.lambda0;
        let pb = Problem::new(params, RetentionContract::proportional(), principle).unwrap();
        let p = estimate_phi(&pb, &Policy::Constant(u), 0.0, lam, 100_000, 21).unwrap();
        let q = estimate_phi_q(&pb, &Policy::Constant(u), 0.0, lam, 100_000, 22).unwrap();
        assert!(p.z_score(&q) <= 3.0, "{p:?} vs {q:?}");
    }
}

#[test]
fn reference_measure_estimator_with_time_curve() {
    let pb = Problem::new(
        ModelParams {
            r: 0.1,
            ..contagion_params()
        },
        RetentionContract::limited_xl(0.5, &U01).unwrap(),
        evp(0.1, 0.3),
    )
    .unwrap();
    let curve = Policy::TimeCurve(TimeCurve::new(vec![0.0, 0.5, 1.0], vec![0.1, 0.4, 0.3]).unwrap());
    let p = estimate_phi(&pb, &curve, 0.2, 1.7, 60_000, 5).unwrap();
    let q = estimate_phi_q(&pb, &curve, 0.2, 1.7, 60_000, 6).unwrap();
    assert!(p.z_score(&q) <= 3.0, "{p:?} vs {q:?}");
}

#[test]
fn reference_measure_rejects_feedback_policies() {
    let pb = Problem::new(contagion_params(), RetentionContract::proportional(), evp(0.1, 0.3)).unwrap();
    let grid = reinsure_core::Grid::uniform(1.0, 2, 1.0, 2.0, 2).unwrap();
    let tab = reinsure_core::PolicyTable::from_time_function(grid, pb.contract, |_| {
        Ok((0.5, reinsure_core::Region::Interior))
    })
    .unwrap();
    let err = estimate_phi_q(&pb, &Policy::Table(tab), 0.0, 1.0, 10, 1).unwrap_err();
    assert!(matches!(err, reinsure_core::Error::Unsupported(_)));
}

#[test]
fn terminal_condition_is_exact() {
    let pb = Problem::new(contagion_params(), RetentionContract::proportional(), evp(0.1, 0.3)).unwrap();
    for est in [
        estimate_phi(&pb, &Policy::Constant(0.3), 1.0, 2.5, 10, 1).unwrap(),
        estimate_phi_q(&pb, &Policy::Constant(0.3), 1.0, 2.5, 10, 1).unwrap(),
    ] {
        assert_eq!((est.mean, est.stderr), (1.0, 0.0));
    }
    assert!(estimate_phi(&pb, &Policy::Constant(0.3), 0.0, 1.0, 0, 1).is_err());
}

#[test]
fn phi_dominates_premium_only_bound() {
    let pb = Problem::new(contagion_params(), RetentionContract::proportional(), evp(0.1, 0.3)).unwrap();
    let lb = estimate_phi_lower_bound(&pb, 0.0, 1.5, 20_000, 8).unwrap();
    for u in [0.0, 0.5, 1.0] {
        let e = estimate_phi(&pb, &Policy::Constant(u), 0.0, 1.5, 20_000, 8).unwrap();
        assert!(e.mean > 0.0);
        assert!(e.mean >= lb.mean - 3.0 * e.stderr.hypot(lb.stderr));
    }
}

#[test]
fn deterministic_intensity_formula_matches_monte_carlo() {
    let params = ModelParams {
        alpha: 1.5,
        lambda0: 3.0,
        ..poisson_params(1.0, 1.0)
    };
    let pb = Problem::new(params, RetentionContract::limited_xl(0.5, &U01).unwrap(), evp(0.2, 0.3)).unwrap();
    let oracle = phi_deterministic_intensity(&pb, 0.2, 0.1, 3.0).unwrap();
    let est = estimate_phi(&pb, &Policy::Constant(0.2), 0.1, 3.0, 100_000, 9).unwrap();
    assert!(est.z_against(oracle) <= 3.0, "{est:?} vs {oracle}");
    // reduces to the constant-intensity formula at λ = β
    let flat = phi_deterministic_intensity(&pb, 0.2, 0.0, 1.0).unwrap();
    let pb0 = Problem {
        params: ModelParams {
            lambda0: 1.0,
            ..pb.params.clone()
        },
        ..pb.clone()
    };
    assert!((flat - phi_closed_form_poisson(&pb0, 0.2, 0.0).unwrap()).abs() < 1e-13);
}

#[test]
fn deterministic_intensity_with_discounting() {
    let params = ModelParams {
        alpha: 1.5,
        lambda0: 3.0,
        r: 0.2,
        ..poisson_params(1.0, 1.0)
    };
    let pb = Problem::new(params, RetentionContract::proportional(), evp(0.2, 0.3)).unwrap();
    let oracle = phi_deterministic_intensity(&pb, 0.6, 0.0, 3.0).unwrap();
    let est = estimate_phi(&pb, &Policy::Constant(0.6), 0.0, 3.0, 100_000, 10).unwrap();
    assert!(est.z_against(oracle) <= 3.0, "{est:?} vs {oracle}");
}

#[test]
fn terminal_wealth_examples() {
    let params = poisson_params(2.0, 3.0);
    let pb = Problem::new(params.clone(), RetentionContract::proportional(), evp(0.2, 0.3)).unwrap();
    let mut path = simulate(Scheme::Exact, &params, 1.0, 2.0, 4).unwrap();
    // no claims: deterministic drift
    path.jumps.clear();
    let c = 2.0 * 1.2 * 0.5;
    let q = 2.0 * 1.3 * 0.5 * 0.6;
    let x = terminal_wealth(&pb, &Policy::Constant(0.4), &path, 5.0).unwrap();
    assert!((x - (5.0 + (c - q) * 2.0)).abs() < 1e-12);
    // one claim at T under null reinsurance
    path.jumps.push(reinsure_core::JumpRecord::claim(3.0, 0.7));
    let x = terminal_wealth(&pb, &Policy::Constant(1.0), &path, 5.0).unwrap();
    assert!((x - (5.0 + c * 2.0 - 0.7)).abs() < 1e-12);
    // full reinsurance: claims are irrelevant
    let x = terminal_wealth(&pb, &Policy::Constant(0.0), &path, 0.0).unwrap();
    assert!((x - 2.0 * 0.5 * (0.2 - 0.3) * 2.0).abs() < 1e-12);
}

#[test]
fn value_function_examples() {
    let p = poisson_params(2.0, 1.0);
    assert_eq!(value_function(&p, 0.3, 0.0, 1.7).unwrap(), 1.7);
    assert!((value_function(&p, 1.0, 2.0, 1.0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
    assert!((value_function(&p, 0.0, 1.0, 1.2669).unwrap() - 0.46606).abs() < 1e-5);
    assert!(value_function(&p, 0.0, 1.0, 0.0).is_err());
}
