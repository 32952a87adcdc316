use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use reinsure_cli::{run, Command as Cmd, RunOptions};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn reinsure(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reinsure"))
        .args(args)
        .env_remove("CONTAGION_OUT")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn small_text() -> String {
    fs::read_to_string(configs().join("small.toml")).unwrap()
}

#[test]
fn simulate_reports_passing_time_change_test() {
    let out = tempfile::tempdir().unwrap();
    let o = reinsure(&[
        "simulate",
        "--config",
        configs().join("poisson.toml").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("ks_pass=true"), "{stdout}");
    let path = fs::read_to_string(out.path().join("path_0000.csv")).unwrap();
    assert!(path.starts_with("# config_sha256="));
    assert!(out.path().join("path_0002.csv").exists());
    assert!(!out.path().join("path_0003.csv").exists());
    let tc = fs::read_to_string(out.path().join("time_change.csv")).unwrap();
    assert_eq!(tc.lines().nth(1), Some("paths,claims,statistic,p_value,pass"));
}

#[test]
fn optimize_on_cox_config_is_flat_in_lambda() {
    let out = tempfile::tempdir().unwrap();
    let s = run(
        Cmd::Optimize,
        &configs().join("cox_lxl.toml"),
        &RunOptions {
            out: Some(out.path().into()),
            workers: Some(1),
            seed: None,
        },
    )
    .unwrap();
    assert_eq!(s.get("converged"), Some("true"));
    assert_eq!(s.get("iterations"), Some("1"));
    assert_eq!(s.get("lambda_constant"), Some("true"));
    let policy = fs::read_to_string(out.path().join("policy.csv")).unwrap();
    let mut lines = policy.lines();
    assert!(lines.next().unwrap().starts_with("# config_sha256="));
    assert_eq!(lines.next(), Some("t,lambda,u_star,region"));
    // ln(1.3)/η with η = 1, r = 0
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    let u: f64 = first[2].parse().unwrap();
    assert!((u - 1.3f64.ln()).abs() < 1e-10, "{u}");
    for name in ["phi.csv", "diagnostics.jsonl", "summary.txt"] {
        assert!(out.path().join(name).exists(), "{name}");
    }
}

#[test]
fn phi_and_check_write_their_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &small_text()
            .replace(
                "probe_paths = 4000",
                "probe_paths = 200\nprobe_times = 3\nprobe_lambdas = 2",
            )
            .replace("[run]", "[run]\npolicy = 0.5"),
    );
    let out = dir.path().join("out");
    let s = run(
        Cmd::Phi,
        &cfg,
        &RunOptions {
            out: Some(out.clone()),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(s.get("cells"), Some("36"));
    let phi = fs::read_to_string(out.join("phi.csv")).unwrap();
    assert_eq!(phi.lines().count(), 2 + 36);
    let s = run(
        Cmd::Check,
        &cfg,
        &RunOptions {
            out: Some(out.clone()),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(s.get("probes"), Some("6"));
    let strana = fs::read_to_string(out.join("strana.csv")).unwrap();
    assert_eq!(strana.lines().nth(1), Some("t,margin,pass"));
    assert_eq!(strana.lines().count(), 2 + 21);
}

#[test]
fn compare_writes_report_with_precondition_label() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &small_text()
            .replace("n_paths = 1000", "n_paths = 300")
            .replace("probe_paths = 4000", "probe_paths = 300"),
    );
    let out = dir.path().join("out");
    let s = run(
        Cmd::Compare,
        &cfg,
        &RunOptions {
            out: Some(out.clone()),
            ..Default::default()
        },
    )
    .unwrap();
    assert!(matches!(
        s.get("precondition"),
        Some("coupled" | "unverified-precondition")
    ));
    let report = fs::read_to_string(out.join("comparison.csv")).unwrap();
    assert_eq!(report.lines().nth(1), Some("t,lambda,u_star,u_cox,violation"));
    assert_eq!(report.lines().count(), 2 + 36);
    assert!(out.join("monotonicity.csv").exists());
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let bad = write_config(
        dir.path(),
        "bad.toml",
        &small_text().replace("rho = 0.5", "rho = 0.5\nmystery = 1"),
    );
    let o = reinsure(&[
        "optimize",
        "--config",
        bad.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mystery"));

    let vpp = write_config(
        dir.path(),
        "vpp.toml",
        &small_text().replace(
            "principle = \"expected_value\"\ntheta_i = 0.1\ntheta_r = 0.3",
            "principle = \"variance\"\neta_i = 0.1\neta_r = 0.2",
        ),
    );
    let o = reinsure(&[
        "compare",
        "--config",
        vpp.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("premium.principle"));

    let o = reinsure(&[
        "optimize",
        "--config",
        dir.path().join("missing.toml").to_str().unwrap(),
        "--out",
        "x",
    ]);
    assert_eq!(o.status.code(), Some(1));

    let o = reinsure(&["optimize", "--config", configs().join("small.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("CONTAGION_OUT"));
}

#[test]
fn numeric_failures_exit_with_two() {
    // a rate this small never produces enough claims for the time-change test
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &fs::read_to_string(configs().join("poisson.toml"))
            .unwrap()
            .replace("beta = 2.0\nlambda0 = 2.0", "beta = 1e-300\nlambda0 = 1e-300")
            .replace("lambda_min = 2.0", "lambda_min = 1e-300"),
    );
    let o = reinsure(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &small_text().replace("[run]", "[run]\npolicy = 0.5"),
    );
    let o = Command::new(env!("CARGO_BIN_EXE_reinsure"))
        .args([
            "phi",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "99",
            "--workers",
            "2",
        ])
        .env("CONTAGION_OUT", dir.path().join("env_out"))
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let phi = fs::read_to_string(dir.path().join("env_out/phi.csv")).unwrap();
    assert!(phi.lines().next().unwrap().contains("seed=99 command=phi"));
}

#[test]
fn artifacts_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &small_text().replace("n_paths = 1000", "n_paths = 300"),
    );
    let mut tables = Vec::new();
    for workers in [1, 3] {
        let out = dir.path().join(format!("w{workers}"));
        run(
            Cmd::Optimize,
            &cfg,
            &RunOptions {
                out: Some(out.clone()),
                workers: Some(workers),
                seed: None,
            },
        )
        .unwrap();
        tables.push((
            fs::read(out.join("policy.csv")).unwrap(),
            fs::read(out.join("phi.csv")).unwrap(),
        ));
    }
    assert_eq!(tables[0], tables[1]);
}
