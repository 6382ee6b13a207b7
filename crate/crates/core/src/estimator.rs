//! Optimal (minimum mean-square error) measurement operator and the
//! quantities derived from it.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{build_density, FieldDensityMatrix, ModelConfig, OpticalAmplitudes};
use crate::linalg::{eigh, max_abs, real_trace, CMatrix};
use crate::prior::{build_gammas, GaussianPrior, MomentOperators};

/// Eigen-sectors with `lambda_i + lambda_j` below this are treated as null.
pub const NULL_SECTOR_TOL: f64 = 1e-12;
/// Largest Gamma_1 entry tolerated inside a null sector.
pub const NULL_SECTOR_RHS_TOL: f64 = 1e-10;

/// Solves `Gamma_0 M + M Gamma_0 = 2 Gamma_1` in the eigenbasis of Gamma_0.
pub fn solve_optimal(g: &MomentOperators) -> Result<CMatrix> {
    let (lambda, v) = eigh(&g.gamma0);
    let rhs = v.adjoint() * &g.gamma1 * &v;
    let n = lambda.len();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let sum = lambda[i] + lambda[j];
            if sum < NULL_SECTOR_TOL {
                let value = rhs[(i, j)].norm();
                if value > NULL_SECTOR_RHS_TOL {
                    return Err(Error::SingularPair {
                        i,
                        j,
                        lambda_sum: sum,
                        value,
                    });
                }
            } else {
                m[(i, j)] = rhs[(i, j)] * (2.0 / sum);
            }
        }
    }
    let m = &v * m * v.adjoint();
    Ok(crate::linalg::hermitian_part(&m))
}

/// `max |Gamma_0 M + M Gamma_0 - 2 Gamma_1|`.
pub fn lyapunov_residual(g: &MomentOperators, m: &CMatrix) -> f64 {
    let r = &g.gamma0 * m + m * &g.gamma0 - g.gamma1.map(|z| z * 2.0);
    max_abs(&r)
}

/// Average minimum cost `Tr{Gamma_2 - M Gamma_0 M}`.
pub fn min_cost(g: &MomentOperators, m: &CMatrix) -> Result<f64> {
    real_trace(&(&g.gamma2 - m * &g.gamma0 * m), "average minimum cost")
}

/// Average estimate `h(g) = Tr{M rho_F(g)}`.
pub fn average_estimate(m: &CMatrix, rho: &FieldDensityMatrix) -> Result<f64> {
    check_dims(m, rho)?;
    real_trace(&(m * &rho.rho), "average estimate")
}

/// Bias `Tr{rho_F(g) (M - g I)} = h(g) - g`.
pub fn bias(m: &CMatrix, rho: &FieldDensityMatrix) -> Result<f64> {
    check_dims(m, rho)?;
    let shifted = m - CMatrix::identity(m.nrows(), m.nrows()).map(|z| z * rho.g);
    real_trace(&(&rho.rho * shifted), "bias")
}

pub(crate) fn check_dims(m: &CMatrix, rho: &FieldDensityMatrix) -> Result<()> {
    if m.nrows() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: m.nrows(),
        });
    }
    Ok(())
}

/// Optimal measurement at one interaction time.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSolution {
    pub m_min: CMatrix,
    /// Possible estimates, ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the projective-measurement eigenvectors.
    pub eigenvectors: CMatrix,
    pub cbar_min: f64,
    pub tau: f64,
    pub gammas: MomentOperators,
}

impl EstimatorSolution {
    pub fn residual(&self) -> f64 {
        lyapunov_residual(&self.gammas, &self.m_min)
    }

    pub fn average_estimate(&self, rho: &FieldDensityMatrix) -> Result<f64> {
        average_estimate(&self.m_min, rho)
    }
}

pub fn solve_gammas(gammas: MomentOperators, tau: f64) -> Result<EstimatorSolution> {
    let m_min = solve_optimal(&gammas)?;
    let cbar_min = min_cost(&gammas, &m_min)?;
    let (eigenvalues, eigenvectors) = eigh(&m_min);
    Ok(EstimatorSolution {
        m_min,
        eigenvalues,
        eigenvectors,
        cbar_min,
        tau,
        gammas,
    })
}

/// Solves the estimation problem for `cfg` at time `tau` (overriding `cfg.tau`).
pub fn solve_at(cfg: &ModelConfig, a: &OpticalAmplitudes, tau: f64) -> Result<EstimatorSolution> {
    let cfg = cfg.with_tau(tau);
    cfg.validate()?;
    let prior = GaussianPrior::new(cfg.g0, cfg.sigma)?;
    let f = cfg.f_coeffs()?;
    solve_gammas(build_gammas(a, &f, &prior)?, tau)
}

pub fn cbar_at(cfg: &ModelConfig, a: &OpticalAmplitudes, tau: f64) -> Result<f64> {
    Ok(solve_at(cfg, a, tau)?.cbar_min)
}

/// Evaluates `rho_F(g)` for `cfg` at time `tau`.
pub fn density_at(
    cfg: &ModelConfig,
    a: &OpticalAmplitudes,
    tau: f64,
    g: f64,
) -> Result<FieldDensityMatrix> {
    build_density(a, &cfg.with_tau(tau).f_coeffs()?, g)
}

/// Closed interval of interaction times searched for the optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow {
    pub min: f64,
    pub max: f64,
}

impl TimeWindow {
    /// First mechanical period.
    pub fn first_period() -> Self {
        TimeWindow {
            min: 0.0,
            max: 2.0 * std::f64::consts::PI,
        }
    }
}

impl Default for TimeWindow {
    fn default() -> Self {
        Self::first_period()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TStarResult {
    pub tau_star: f64,
    pub cbar_at_star: f64,
    pub solution: EstimatorSolution,
    /// The minimum sits on the window boundary; the true optimum may lie outside.
    pub at_edge: bool,
}

pub const TSTAR_MIN_GRID: usize = 16;
pub const TSTAR_TOL: f64 = 1e-6;

/// Global minimum of the average minimum cost over `window`: a uniform scan
/// with `grid` points followed by golden-section refinement around the best
/// grid point.
pub fn find_tstar(
    cfg: &ModelConfig,
    a: &OpticalAmplitudes,
    window: TimeWindow,
    grid: usize,
) -> Result<TStarResult> {
    if grid < TSTAR_MIN_GRID {
        return Err(Error::InvalidConfig(format!(
            "t* grid needs >= {TSTAR_MIN_GRID} points"
        )));
    }
    if !(window.min >= 0.0 && window.max > window.min) {
        return Err(Error::InvalidConfig(
            "t* window must satisfy 0 <= min < max".into(),
        ));
    }
    let step = (window.max - window.min) / (grid - 1) as f64;
    let taus: Vec<f64> = (0..grid).map(|i| window.min + step * i as f64).collect();
    let costs = taus
        .par_iter()
        .map(|&t| cbar_at(cfg, a, t))
        .collect::<Result<Vec<_>>>()?;
    let best = costs
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .unwrap();
    let at_edge = best == 0 || best == grid - 1;

    let lo = taus[best.saturating_sub(1)];
    let hi = taus[(best + 1).min(grid - 1)];
    let (t_ref, c_ref) = golden_section(|t| cbar_at(cfg, a, t), lo, hi, TSTAR_TOL)?;
    let tau_star = if c_ref <= costs[best] {
        t_ref
    } else {
        taus[best]
    };
    let solution = solve_at(cfg, a, tau_star)?;
    Ok(TStarResult {
        tau_star,
        cbar_at_star: solution.cbar_min,
        solution,
        at_edge,
    })
}

fn golden_section<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}
