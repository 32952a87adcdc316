use proptest::prelude::*;
use reinsure_core::process::{
    dynkin_check, intensity_at, intensity_at_from, ks_exponential, mean_claim_count_from, mean_intensity,
    pooled_time_change_increments, simulate, simulate_exact, simulate_thinning, time_change_increments,
    MarkDistribution, ModelParams, Scheme, SelfExcitation,
};
use reinsure_core::rng::derive;

const U01: MarkDistribution = MarkDistribution::Uniform { a: 0.0, b: 1.0 };

fn contagion(horizon: f64) -> ModelParams {
    ModelParams {
        alpha: 2.0,
        beta: 1.0,
        lambda0: 1.0,
        rho: 0.5,
        r: 0.0,
        eta: 1.0,
        horizon,
        claim_dist: U01,
        ext_dist: U01,
        self_excitation: SelfExcitation::Linear(1.0),
        unsafe_moments: false,
    }
}

fn poisson(rate: f64, horizon: f64) -> ModelParams {
    ModelParams {
        alpha: 1.0,
        beta: rate,
        lambda0: rate,
        rho: 0.0,
        self_excitation: SelfExcitation::Zero,
        ..contagion(horizon)
    }
}

/// Mean and standard error of `f` over `n` independent paths.
fn sample_mean<F: FnMut(u64) -> f64>(n: u64, mut f: F) -> (f64, f64) {
    let xs: Vec<f64> = (0..n).map(&mut f).collect();
    let m = xs.iter().sum::<f64>() / n as f64;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (m, (v / n as f64).sqrt())
}

#[test]
fn exact_claim_count_matches_integrated_mean_intensity() {
    let p = contagion(10.0);
    // independent oracle: trapezoidal integration of the closed-form mean
    let k = 200_000;
    let h = p.horizon / k as f64;
    let mut oracle = 0.5 * (mean_intensity(&p, 0.0) + mean_intensity(&p, p.horizon));
    for i in 1..k {
        oracle += mean_intensity(&p, i as f64 * h);
    }
    oracle *= h;
    assert!((oracle - mean_claim_count_from(&p, 1.0, 10.0)).abs() < 1e-8);
    let (m, se) = sample_mean(100_000, |i| {
        simulate_exact(&p, derive(1, i)).unwrap().claim_count() as f64
    });
    assert!((m - oracle).abs() <= 3.0 * se, "{m} ± {se} vs {oracle}");
}

#[test]
fn thinning_and_exact_agree_on_claim_counts() {
    let p = contagion(10.0);
    let (a, sa) = sample_mean(100_000, |i| {
        simulate_exact(&p, derive(2, i)).unwrap().claim_count() as f64
    });
    let (b, sb) = sample_mean(100_000, |i| {
        simulate_thinning(&p, derive(3, i), 0.25).unwrap().claim_count() as f64
    });
    assert!((a - b).abs() <= 3.0 * sa.hypot(sb), "{a} vs {b}");
}

#[test]
fn coupled_scheme_agrees_with_exact() {
    let p = contagion(10.0);
    let (a, sa) = sample_mean(50_000, |i| {
        simulate_exact(&p, derive(4, i)).unwrap().terminal_intensity()
    });
    let (b, sb) = sample_mean(50_000, |i| {
        simulate(Scheme::Coupled, &p, 0.0, 1.0, derive(5, i))
            .unwrap()
            .terminal_intensity()
    });
    assert!((a - b).abs() <= 3.0 * sa.hypot(sb), "{a} vs {b}");
}

#[test]
fn thinning_with_zero_margin_on_constant_intensity_is_poisson() {
    let p = poisson(1.5, 4.0);
    let n = 20_000;
    let mut counts = vec![0usize; 40];
    for i in 0..n {
        let c = simulate_thinning(&p, derive(6, i), 0.0).unwrap().claim_count();
        counts[c.min(39)] += 1;
    }
    // χ² goodness of fit against Poisson(6), pooling sparse tails
    let mut pmf = vec![(-6.0f64).exp()];
    for k in 1..40 {
        pmf.push(pmf[k - 1] * 6.0 / k as f64);
    }
    let cdf = |k: usize| pmf[..=k].iter().sum::<f64>();
    let (mut lo, mut hi) = (0usize, 39usize);
    while pmf[lo] * (n as f64) < 5.0 {
        lo += 1;
    }
    while pmf[hi] * (n as f64) < 5.0 {
        hi -= 1;
    }
    let mut chi2 = 0.0;
    let mut cells = 0;
    for k in lo..=hi {
        let expected = if k == lo {
            cdf(lo)
        } else if k == hi {
            1.0 - cdf(hi - 1)
        } else {
            pmf[k]
        } * n as f64;
        let observed: usize = if k == lo {
            counts[..=lo].iter().sum()
        } else if k == hi {
            counts[hi..].iter().sum()
        } else {
            counts[k]
        };
        chi2 += (observed as f64 - expected).powi(2) / expected;
        cells += 1;
    }
    // Wilson–Hilferty: the cube root of χ²/k is close to normal
    let dof = (cells - 1) as f64;
    let v = 2.0 / (9.0 * dof);
    let z = ((chi2 / dof).cbrt() - (1.0 - v)) / v.sqrt();
    // upper 1% normal quantile
    assert!(z < 2.326, "chi2 = {chi2} on {dof} dof, z = {z}");
}

#[test]
fn time_change_is_exponential_for_every_scheme() {
    for (scheme, params) in [
        (Scheme::Exact, poisson(2.0, 10.0)),
        (Scheme::Exact, contagion(10.0)),
        (Scheme::Thinning { margin: 0.1 }, contagion(10.0)),
        (Scheme::Coupled, contagion(10.0)),
    ] {
        let mut paths = Vec::new();
        let mut claims = 0;
        while claims < 10_000 {
            let path = simulate(scheme, &params, 0.0, params.lambda0, derive(7, paths.len() as u64)).unwrap();
            claims += path.claim_count();
            paths.push(path);
        }
        let inc = pooled_time_change_increments(&paths);
        assert!(inc.len() >= 10_000);
        let ks = ks_exponential(&inc).unwrap();
        assert!(ks.p_value > 0.01, "{scheme:?}: {ks:?}");
    }
}

#[test]
fn generator_identity_holds() {
    let reports = dynkin_check(&contagion(1.0), Scheme::Exact, 100_000, 8).unwrap();
    for r in reports {
        assert!(r.passed, "{r:?}");
    }
}

#[test]
fn mean_of_terminal_intensity_matches_ode() {
    let p = contagion(1.0);
    let (m, se) = sample_mean(100_000, |i| {
        simulate_exact(&p, derive(9, i)).unwrap().terminal_intensity()
    });
    assert!((m - mean_intensity(&p, 1.0)).abs() <= 3.0 * se);
    assert!((mean_intensity(&p, 1.0) - 1.38843).abs() < 5e-6);
}

#[test]
fn exact_simulation_is_bitwise_reproducible() {
    let p = contagion(10.0);
    for seed in [0, 1, u64::MAX] {
        let a = simulate_exact(&p, seed).unwrap();
        let b = simulate_exact(&p, seed).unwrap();
        assert_eq!(a.to_csv(None), b.to_csv(None));
    }
}

#[test]
fn low_rate_paths_may_be_empty() {
    let p = ModelParams {
        beta: 1e-6,
        lambda0: 1e-6,
        rho: 0.0,
        ..contagion(1.0)
    };
    let path = simulate_exact(&p, 3).unwrap();
    assert!(path.jumps.is_empty());
    path.validate().unwrap();
}

#[test]
fn constant_intensity_paths_have_poisson_gaps() {
    let p = poisson(3.0, 10.0);
    let mut gaps = Vec::new();
    let mut prev = 0.0;
    for i in 0..400 {
        let path = simulate_exact(&p, derive(10, i)).unwrap();
        // one long clock: the time left after a path's last claim carries over
        for c in path.claims() {
            gaps.push(3.0 * (c.time - prev));
            prev = c.time;
        }
        prev -= 10.0;
    }
    assert!(ks_exponential(&gaps).unwrap().p_value > 0.01);
}

#[test]
fn path_csv_has_header_and_rows() {
    let p = contagion(2.0);
    let path = simulate_exact(&p, 4).unwrap();
    let csv = path.to_csv(Some("config_sha256=abc"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# config_sha256=abc"));
    assert_eq!(lines.next(), Some("time,kind,mark,lambda_after"));
    for (line, j) in lines.zip(&path.jumps) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0].parse::<f64>().unwrap(), j.time);
        assert_eq!(f[1], j.kind.as_str());
        assert_eq!(f[2].parse::<f64>().unwrap(), j.mark);
        let after: f64 = f[3].parse().unwrap();
        assert!((after - path.intensity_at(j.time, false)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn intensity_never_drops_below_floor(seed in any::<u64>(), lam0 in 0.05f64..5.0, beta in 0.05f64..5.0) {
        let p = ModelParams { lambda0: lam0, beta, ..contagion(5.0) };
        for scheme in [Scheme::Exact, Scheme::Thinning { margin: 0.0 }, Scheme::Coupled] {
            let path = simulate(scheme, &p, 0.0, lam0, seed).unwrap();
            path.validate().unwrap();
            for k in 0..=50 {
                let t = 5.0 * k as f64 / 50.0;
                prop_assert!(path.intensity_at(t, false) >= p.intensity_floor() * (1.0 - 1e-12));
                prop_assert!(path.intensity_at(t, true) > 0.0);
            }
        }
    }

    #[test]
    fn explicit_sum_matches_recursion(seed in any::<u64>(), t in 0.0f64..5.0) {
        let p = contagion(5.0);
        let path = simulate_exact(&p, seed).unwrap();
        let a = intensity_at(&p, &path.jumps, t).unwrap();
        let b = path.intensity_at(t, false);
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
        // at a jump time the explicit sum includes the jump, the left limit does not
        if let Some(j) = path.jumps.first() {
            let after = intensity_at(&p, &path.jumps, j.time).unwrap();
            let before = intensity_at_from(&p, 0.0, p.lambda0, &path.jumps, j.time, true).unwrap();
            prop_assert!((after - before - j.intensity_jump(&p)).abs() < 1e-12);
        }
    }

    #[test]
    fn coupled_scheme_is_monotone(seed in any::<u64>(), l1 in 0.2f64..3.0, extra in 0.0f64..3.0) {
        let p = contagion(3.0);
        let lo = simulate(Scheme::Coupled, &p, 0.0, l1, seed).unwrap();
        let hi = simulate(Scheme::Coupled, &p, 0.0, l1 + extra, seed).unwrap();
        prop_assert!(hi.claim_count() >= lo.claim_count());
        for k in 0..=30 {
            let t = 3.0 * k as f64 / 30.0;
            prop_assert!(hi.intensity_at(t, false) >= lo.intensity_at(t, false) - 1e-12);
        }
    }
}

#[test]
fn unsorted_jumps_are_rejected() {
    let p = contagion(1.0);
    let jumps = vec![
        reinsure_core::JumpRecord::claim(0.5, 0.1),
        reinsure_core::JumpRecord::external(0.2, 0.1),
    ];
    assert!(matches!(
        intensity_at(&p, &jumps, 1.0),
        Err(reinsure_core::Error::Structural(_))
    ));
}

#[test]
fn single_long_path_time_change_is_exponential() {
    let p = contagion(4000.0);
    let path = simulate_exact(&p, 12).unwrap();
    let inc = time_change_increments(&path);
    assert!(inc.len() > 5000);
    let ks = ks_exponential(&inc).unwrap();
    assert!(ks.p_value > 0.01, "{ks:?}");
}
