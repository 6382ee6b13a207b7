//! End-to-end runs of the command-line binary.

use optomech_mmse::config::RunConfig;
use optomech_mmse::estimator::solve_at;
use optomech_mmse::field::OpticalAmplitudes;
use optomech_mmse::oracle::cost_quadrature;
use optomech_mmse::prior::GaussianPrior;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_optomech-mmse");

fn presets() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets")
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn preset(name: &str) -> String {
    presets()
        .join(format!("{name}.cfg"))
        .to_string_lossy()
        .into_owned()
}

fn command_of(cfg: &str) -> String {
    let text = std::fs::read_to_string(cfg).unwrap();
    text.lines()
        .find_map(|l| l.split('#').next().unwrap().trim().strip_prefix("command"))
        .map(|rest| rest.trim_start_matches([' ', '=']).trim().to_string())
        .expect("preset names its command")
}

fn rows(csv: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let body = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, body)
}

#[test]
fn every_preset_reproduces_its_expected_table() {
    let mut names: Vec<String> = std::fs::read_dir(presets())
        .unwrap()
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension()? == "cfg").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    assert!(names.len() >= 12);
    for name in names {
        let cfg = preset(&name);
        let out = run(&[&command_of(&cfg), "--config", &cfg]);
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let got = String::from_utf8(out.stdout).unwrap();
        let want = std::fs::read_to_string(presets().join(format!("expected/{name}.csv"))).unwrap();
        let (h1, r1) = rows(&got);
        let (h2, r2) = rows(&want);
        assert_eq!(h1, h2, "{name}");
        assert_eq!(r1.len(), r2.len(), "{name}");
        for (a, b) in r1.iter().flatten().zip(r2.iter().flatten()) {
            assert!(
                (a - b).abs() <= 1e-12 * (1.0 + b.abs()),
                "{name}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn output_is_deterministic_and_out_flag_matches_stdout() {
    let cfg = preset("fig7");
    let first = run(&["cost-curve", "--config", &cfg]);
    let second = run(&["cost-curve", "--config", &cfg]);
    assert_eq!(first.stdout, second.stdout);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let p = path.to_string_lossy();
    let third = run(&["cost-curve", "--config", &cfg, "--out", &p]);
    assert!(third.status.success());
    assert_eq!(std::fs::read(&path).unwrap(), first.stdout);
}

#[test]
fn verify_passes_on_defaults_and_fails_on_corrupted_moments() {
    let cfg = preset("fig1");
    let ok = run(&["verify", "--config", &cfg]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );
    let bad = run(&["verify", "--config", &cfg, "--set", "corrupt_f2=true"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL"));
}

#[test]
fn domain_and_config_errors_exit_with_two() {
    let cfg = preset("fig1");
    let cases: &[&[&str]] = &[
        &["sigma=-1"],
        &["mech=thermal", "n_th=-0.5"],
        &["n_phot=1"],
        &["tau_steps=1"],
        &["bogus=3"],
    ];
    for sets in cases {
        let mut args = vec!["cost-curve", "--config", &cfg];
        for s in *sets {
            args.extend(["--set", s]);
        }
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{sets:?}");
        assert!(
            String::from_utf8_lossy(&out.stderr).starts_with("error:"),
            "{sets:?}"
        );
    }
    let missing = run(&["cost-curve", "--config", "/nonexistent/none.cfg"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn cost_curve_row_matches_direct_quadrature() {
    let cfg = preset("fig1");
    let out = run(&[
        "cost-curve",
        "--config",
        &cfg,
        "--set",
        "tau_min=1",
        "--set",
        "tau_max=2",
        "--set",
        "tau_steps=2",
    ]);
    assert!(out.status.success());
    let (_, body) = rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(body[0][0], 1.0);
    let rc = RunConfig::load(Some(Path::new(&cfg)), &[]).unwrap();
    let model = rc.model.with_tau(1.0);
    let a: &OpticalAmplitudes = &rc.amplitudes;
    let sol = solve_at(&model, a, 1.0).unwrap();
    let prior = GaussianPrior::new(model.g0, model.sigma).unwrap();
    let direct = cost_quadrature(&model.f_coeffs().unwrap(), a, &prior, &sol.m_min).unwrap();
    assert!(
        (body[0][1] - direct).abs() < 1e-8,
        "{} vs {direct}",
        body[0][1]
    );
}

#[test]
fn bound_rows_never_exceed_mse() {
    for name in ["fig9", "fig10", "fig11", "fig12"] {
        let cfg = preset(name);
        let out = run(&["crb-curve", "--config", &cfg]);
        assert!(out.status.success());
        let (header, body) = rows(&String::from_utf8(out.stdout).unwrap());
        let lb = header.iter().position(|h| h == "lower_bound").unwrap();
        let mse = header.iter().position(|h| h == "mse").unwrap();
        for r in body {
            assert!(r[mse] >= r[lb] - 1e-12, "{name}: {r:?}");
        }
    }
}
