//! Sweeps behind the command-line subcommands, rendered as CSV or plain
//! text. Grid points are evaluated in parallel and emitted in grid order.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::bound::{
    derivative_information, drho_commutator, drho_dg, evaluate_bound, mse_direct, x_of_g,
};
use crate::config::{fmt, RunConfig};
use crate::error::{Error, Result};
use crate::estimator::{average_estimate, bias, find_tstar, solve_at, TStarResult};
use crate::field::{
    build_density, f_coeffs_coherent, f_coeffs_squeezed, f_coeffs_squeezed_printed,
    f_coeffs_thermal, FCoefficients, MechInit, ModelConfig, OpticalAmplitudes,
};
use crate::linalg::{c, max_abs_diff};
use crate::oracle;
use crate::prior::{build_gammas, GaussianPrior};

fn header(command: &str, rc: &RunConfig, extra: &[(String, String)]) -> String {
    let mut out = format!("# optomech-mmse {command}\n");
    for (k, v) in rc.resolved().iter().chain(extra) {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out
}

fn csv_body(columns: &[String], rows: &[Vec<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(columns).map_err(io)?;
    for row in rows {
        if let Some(bad) = row.iter().find(|x| !x.is_finite()) {
            return Err(Error::NumericalConsistency {
                what: "non-finite CSV value",
                imag: *bad,
            });
        }
        w.write_record(row.iter().map(|&x| fmt(x))).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is ASCII"))
}

/// Columns `tau, cbar_min, eig_1..eig_N` over the tau grid.
pub fn cost_curve(rc: &RunConfig) -> Result<String> {
    let taus = rc.tau_grid.points();
    let rows = taus
        .par_iter()
        .map(|&tau| {
            let sol = solve_at(&rc.model, &rc.amplitudes, tau)?;
            let mut row = vec![tau, sol.cbar_min];
            row.extend(sol.eigenvalues.iter());
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cols = vec!["tau".to_string(), "cbar_min".to_string()];
    cols.extend((1..=rc.model.n_phot).map(|k| format!("eig_{k}")));
    Ok(header("cost-curve", rc, &[]) + &csv_body(&cols, &rows)?)
}

pub fn tstar(rc: &RunConfig) -> Result<TStarResult> {
    find_tstar(&rc.model, &rc.amplitudes, rc.window, rc.tstar_grid)
}

fn tstar_header(t: &TStarResult) -> Vec<(String, String)> {
    vec![
        ("tau_star".into(), fmt(t.tau_star)),
        ("cbar_at_star".into(), fmt(t.cbar_at_star)),
        ("tau_star_at_edge".into(), t.at_edge.to_string()),
    ]
}

/// Columns `g, h, bias, mse` at the optimal time.
pub fn estimator_curve(rc: &RunConfig) -> Result<String> {
    let t = tstar(rc)?;
    let f = rc.model.with_tau(t.tau_star).f_coeffs()?;
    let m = &t.solution.m_min;
    let rows = rc
        .g_grid
        .points()
        .par_iter()
        .map(|&g| {
            let rho = build_density(&rc.amplitudes, &f, g)?;
            Ok(vec![
                g,
                average_estimate(m, &rho)?,
                bias(m, &rho)?,
                mse_direct(&rho, m)?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let cols: Vec<String> = ["g", "h", "bias", "mse"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    Ok(header("estimator-curve", rc, &tstar_header(&t)) + &csv_body(&cols, &rows)?)
}

/// CSV text plus one note per omitted (degenerate) row.
#[derive(Debug, Clone, PartialEq)]
pub struct CrbCurve {
    pub csv: String,
    pub notes: Vec<String>,
}

/// Columns `g, x, denom, lower_bound, mse` at the optimal time.
pub fn crb_curve(rc: &RunConfig) -> Result<CrbCurve> {
    let t = tstar(rc)?;
    let f = rc.model.with_tau(t.tau_star).f_coeffs()?;
    let m = &t.solution.m_min;
    let results: Vec<(f64, Result<_>)> = rc
        .g_grid
        .points()
        .par_iter()
        .map(|&g| (g, evaluate_bound(&f, &rc.amplitudes, m, g)))
        .collect();
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for (g, r) in results {
        match r {
            Ok(b) => rows.push(vec![b.g, b.x, b.denom, b.lower_bound, b.mse]),
            Err(Error::DegenerateDerivative { denom, .. }) => notes.push(format!(
                "g = {}: omitted, Tr{{rho L^2}} = {denom:e} is degenerate",
                fmt(g)
            )),
            Err(e) => return Err(e),
        }
    }
    let cols: Vec<String> = ["g", "x", "denom", "lower_bound", "mse"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    Ok(CrbCurve {
        csv: header("crb-curve", rc, &tstar_header(&t)) + &csv_body(&cols, &rows)?,
        notes,
    })
}

/// `tstar=<v> cbar=<v>` followed by the spectrum and the edge flag.
pub fn find_tstar_report(rc: &RunConfig) -> Result<String> {
    let t = tstar(rc)?;
    let eigs: Vec<String> = t.solution.eigenvalues.iter().map(|&x| fmt(x)).collect();
    let mut out = format!("tstar={} cbar={}\n", fmt(t.tau_star), fmt(t.cbar_at_star));
    let _ = writeln!(
        out,
        "cbar_over_sigma2={}",
        fmt(t.cbar_at_star / rc.model.sigma.powi(2))
    );
    let _ = writeln!(out, "eigenvalues={}", eigs.join(","));
    let _ = writeln!(out, "at_edge={}", t.at_edge);
    Ok(out)
}

/// One line of the verification table.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Worst observed discrepancy (NaN if the check could not run).
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
    pub detail: Option<String>,
}

impl Check {
    fn from_result(name: &str, tol: f64, r: Result<f64>) -> Self {
        match r {
            Ok(value) => Check {
                name: name.into(),
                value,
                tol,
                passed: value <= tol,
                detail: None,
            },
            Err(e) => Check {
                name: name.into(),
                value: f64::NAN,
                tol,
                passed: false,
                detail: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    /// Per-entry residuals of the printed squeezed expansion against the oracle.
    pub residual_report: Vec<String>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = write!(
                out,
                "{status}  {:<width$}  value={:.3e}  tol={:.1e}",
                c.name, c.value, c.tol
            );
            if let Some(d) = &c.detail {
                let _ = write!(out, "  ({d})");
            }
            out.push('\n');
        }
        out.push_str("# squeezed printed-expansion residuals\n");
        for line in &self.residual_report {
            let _ = writeln!(out, "# {line}");
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "{passed}/{} checks passed", self.checks.len());
        out
    }
}

const VERIFY_G: [f64; 3] = [0.5, 1.0, 2.0];

fn analytic_coeffs(model: &ModelConfig, corrupt: bool) -> Result<FCoefficients> {
    let mut f = model.f_coeffs()?;
    if corrupt {
        f.f2 = f.f2.map(|z| -z);
    }
    Ok(f)
}

fn worst<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    let mut w = 0.0f64;
    for v in it {
        w = w.max(v?);
    }
    Ok(w)
}

/// Runs every two-route equivalence and invariant at `rc.verify_tau` (and at
/// the optimal time for the bound and spectral checks).
pub fn verify(rc: &RunConfig) -> VerifyReport {
    let model = rc.model.with_tau(rc.verify_tau);
    let a = &rc.amplitudes;
    let thermal = matches!(model.mech, MechInit::Thermal { .. });
    let state_tol = if thermal { 1e-6 } else { 1e-8 };
    let prior = GaussianPrior::new(model.g0, model.sigma);
    let mut checks = Vec::new();

    checks.push(Check::from_result(
        "state: closed form vs joint evolution",
        state_tol,
        (|| {
            let f = analytic_coeffs(&model, rc.corrupt_f2)?;
            worst(VERIFY_G.iter().map(|&g| {
                let an = build_density(a, &f, g)?;
                let or = oracle::reduced_state(&model, a, g)?;
                Ok(max_abs_diff(&an.rho, &or.rho))
            }))
        })(),
    ));

    checks.push(Check::from_result(
        "moments: closed form vs quadrature",
        1e-8,
        (|| {
            let prior = prior.clone()?;
            let f = analytic_coeffs(&model, rc.corrupt_f2)?;
            let closed = build_gammas(a, &f, &prior)?;
            let reference = model.f_coeffs()?;
            worst((0..3).map(|k| {
                let q = oracle::gamma_quadrature(&reference, a, &prior, k)?;
                Ok(max_abs_diff(closed.get(k), &q))
            }))
        })(),
    ));

    let solved = solve_at(&model, a, model.tau);
    checks.push(Check::from_result(
        "lyapunov: residual",
        1e-10,
        solved.as_ref().map(|s| s.residual()).map_err(Clone::clone),
    ));
    checks.push(Check::from_result(
        "lyapunov: eigenbasis vs integral quadrature",
        1e-6,
        solved.as_ref().map_err(Clone::clone).and_then(|s| {
            let q = oracle::mmse_integral_quadrature(&s.gammas)?;
            Ok(max_abs_diff(&q, &s.m_min))
        }),
    ));
    checks.push(Check::from_result(
        "cost: closed form vs quadrature",
        1e-8,
        solved.as_ref().map_err(Clone::clone).and_then(|s| {
            let q = oracle::cost_quadrature(&model.f_coeffs()?, a, &prior.clone()?, &s.m_min)?;
            Ok((q - s.cbar_min).abs())
        }),
    ));

    checks.push(Check::from_result(
        "derivative: closed form vs central difference",
        1e-8,
        (|| {
            let f = model.f_coeffs()?;
            worst(VERIFY_G.iter().map(|&g| {
                let d = drho_dg(&f, a, g)?;
                let fd = oracle::drho_finite_difference(&f, a, g, 1e-5)?;
                Ok(max_abs_diff(&d.drho, &fd))
            }))
        })(),
    ));
    if let MechInit::Coherent { .. } = model.mech {
        checks.push(Check::from_result(
            "derivative: commutator form",
            1e-10,
            (|| {
                let f = model.f_coeffs()?;
                worst(VERIFY_G.iter().map(|&g| {
                    let rho = build_density(a, &f, g)?;
                    let d = drho_dg(&f, a, g)?;
                    Ok(max_abs_diff(
                        &d.drho,
                        &drho_commutator(model.mech.alpha(), model.tau, &rho),
                    ))
                }))
            })(),
        ));
    }

    let at_star = tstar(rc);
    checks.push(Check::from_result(
        "bound: x(g) vs finite difference",
        1e-6,
        at_star.as_ref().map_err(Clone::clone).and_then(|t| {
            let f = rc.model.with_tau(t.tau_star).f_coeffs()?;
            let m = &t.solution.m_min;
            worst(VERIFY_G.iter().map(|&g| {
                let rho = build_density(a, &f, g)?;
                let d = drho_dg(&f, a, g)?;
                let x = x_of_g(&rho, &d.drho, m)?;
                Ok((x - oracle::x_finite_difference(&f, a, m, g, 1e-5)?).abs())
            }))
        }),
    ));
    checks.push(Check::from_result(
        "bound: lower_bound - mse on g in [0, 2]",
        1e-12,
        at_star.as_ref().map_err(Clone::clone).and_then(|t| {
            let f = rc.model.with_tau(t.tau_star).f_coeffs()?;
            let mut w = f64::NEG_INFINITY;
            for i in 0..41 {
                let g = 0.05 * i as f64;
                let rho = build_density(a, &f, g)?;
                let d = drho_dg(&f, a, g)?;
                if derivative_information(&rho, &d.drho)? < crate::bound::DEGENERATE_DENOM_TOL {
                    continue;
                }
                let b = evaluate_bound(&f, a, &t.solution.m_min, g)?;
                w = w.max(b.lower_bound - b.mse);
            }
            Ok(w)
        }),
    ));
    checks.push(Check::from_result(
        "mse: trace form vs spectral sum",
        1e-10,
        at_star.as_ref().map_err(Clone::clone).and_then(|t| {
            let rho = build_density(a, &rc.model.with_tau(t.tau_star).f_coeffs()?, rc.model.g0)?;
            let direct = mse_direct(&rho, &t.solution.m_min)?;
            Ok((direct - oracle::mse_spectral(&t.solution.m_min, &rho)?).abs())
        }),
    ));
    if model.mech.is_undisplaced() {
        checks.push(Check::from_result(
            "symmetry: h(g) - h(-g)",
            1e-10,
            at_star.as_ref().map_err(Clone::clone).and_then(|t| {
                let f = rc.model.with_tau(t.tau_star).f_coeffs()?;
                let m = &t.solution.m_min;
                worst((0..=20).map(|i| {
                    let g = 0.1 * i as f64;
                    let hp = average_estimate(m, &build_density(a, &f, g)?)?;
                    let hm = average_estimate(m, &build_density(a, &f, -g)?)?;
                    Ok((hp - hm).abs())
                }))
            }),
        ));
    }

    checks.push(Check::from_result(
        "reduction: thermal(0) vs ground coherent",
        1e-14,
        Ok(max_abs_diff(
            &f_coeffs_thermal(0.0, model.tau, model.n_phot).f2,
            &f_coeffs_coherent(c(0.0, 0.0), model.tau, model.n_phot).f2,
        )),
    ));
    checks.push(Check::from_result(
        "reduction: squeezed(zeta = 0) vs coherent",
        1e-12,
        (|| {
            let alpha = model.mech.alpha();
            let s = f_coeffs_squeezed(alpha, 0.0, 0.0, model.tau, model.n_phot)?;
            let k = f_coeffs_coherent(alpha, model.tau, model.n_phot);
            worst(VERIFY_G.iter().map(|&g| {
                Ok(max_abs_diff(
                    &build_density(a, &s, g)?.rho,
                    &build_density(a, &k, g)?.rho,
                ))
            }))
        })(),
    ));

    VerifyReport {
        checks,
        residual_report: printed_residuals(&model, a),
    }
}

/// Compares the printed squeezed expansion with the oracle. Uses the
/// configured squeezed state, or a reference one for other inputs.
fn printed_residuals(model: &ModelConfig, a: &OpticalAmplitudes) -> Vec<String> {
    let (alpha, r, theta, tau) = match model.mech {
        MechInit::Squeezed {
            zeta_abs,
            zeta_phase,
            ..
        } => (model.mech.alpha(), zeta_abs, zeta_phase, model.tau),
        _ => (
            c(1.0, 0.0),
            0.5,
            std::f64::consts::FRAC_PI_2,
            std::f64::consts::FRAC_PI_4,
        ),
    };
    let sq = ModelConfig {
        tau,
        mech: MechInit::squeezed(alpha, r, theta),
        ..*model
    };
    let mut lines = vec![format!(
        "alpha = {alpha}, |zeta| = {r}, theta = {theta}, tau = {tau}, N = {}",
        model.n_phot
    )];
    let printed = match f_coeffs_squeezed_printed(alpha, r, theta, tau, model.n_phot) {
        Ok(p) => p,
        Err(e) => {
            lines.push(format!("printed expansion unavailable: {e}"));
            return lines;
        }
    };
    let derived = match f_coeffs_squeezed(alpha, r, theta, tau, model.n_phot) {
        Ok(d) => d,
        Err(e) => {
            lines.push(format!("closed form unavailable: {e}"));
            return lines;
        }
    };
    for g in VERIFY_G {
        let or = match oracle::reduced_state(&sq, a, g) {
            Ok(o) => o,
            Err(e) => {
                lines.push(format!("g = {g}: oracle failed: {e}"));
                continue;
            }
        };
        for n in 0..model.n_phot {
            for m in 0..n {
                let lit =
                    a.as_slice()[n] * a.as_slice()[m].conj() * printed.exponent(g, n, m).exp();
                let der =
                    a.as_slice()[n] * a.as_slice()[m].conj() * derived.exponent(g, n, m).exp();
                lines.push(format!(
                    "g = {g}, entry ({n},{m}): |printed - oracle| = {:.3e}, |closed form - oracle| = {:.3e}",
                    (lit - or.rho[(n, m)]).norm(),
                    (der - or.rho[(n, m)]).norm()
                ));
            }
        }
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(extra: &str) -> RunConfig {
        RunConfig::parse(&format!(
            "tau_steps = 5\ng_steps = 5\ntstar_grid = 64\n{extra}"
        ))
        .unwrap()
    }

    #[test]
    fn cost_curve_first_row_is_prior_variance() {
        let csv = cost_curve(&quick("")).unwrap();
        let line = csv.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(line, "tau,cbar_min,eig_1,eig_2");
        let first: Vec<f64> = csv
            .lines()
            .filter(|l| !l.starts_with('#'))
            .nth(1)
            .unwrap()
            .split(',')
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(first[0], 0.0);
        assert!((first[1] - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(first[2].abs() < 1e-12 && (first[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn estimator_curve_records_tstar() {
        let csv = estimator_curve(&quick("")).unwrap();
        assert!(csv.lines().any(|l| l.starts_with("# tau_star = ")));
        assert!(csv.lines().any(|l| l == "g,h,bias,mse"));
    }

    #[test]
    fn tstar_report_format() {
        let r = find_tstar_report(&quick("")).unwrap();
        let first = r.lines().next().unwrap();
        assert!(first.starts_with("tstar=") && first.contains(" cbar="));
    }

    #[test]
    fn verify_defaults_pass_and_negative_control_fails() {
        let ok = verify(&quick(""));
        assert!(ok.all_passed(), "{}", ok.render());
        let bad = verify(&quick("corrupt_f2 = true"));
        assert!(!bad.all_passed());
        assert!(!bad.checks[0].passed);
    }
}
