//! Brute-force counterparts of every closed form: joint photon⊗phonon
//! evolution with numeric block exponentials followed by a partial trace,
//! and adaptive quadrature of the Gaussian and Lyapunov integrals.

pub mod fock;
pub mod quad;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{
    build_density, FCoefficients, FieldDensityMatrix, MechInit, ModelConfig, OpticalAmplitudes,
};
use crate::linalg::{eigh, psd_sqrt, real_part, trace, CMatrix};
use crate::prior::{GaussianPrior, MomentOperators};

pub use quad::{gauss_hermite, integrate_matrix};

/// Tensor Gauss–Hermite nodes per axis for the thermal P-function.
pub const THERMAL_NODES: usize = 40;
/// Thermal nodes with weight below this are skipped.
pub const THERMAL_PRUNE: f64 = 1e-16;
pub const DEFAULT_TAIL_TOL: f64 = 1e-18;
/// Upper limit for automatic truncation doubling.
pub const MAX_N_MECH: usize = 4096;

const GAMMA_QUAD_TOL: f64 = 1e-13;
const COST_QUAD_TOL: f64 = 1e-13;
const MMSE_QUAD_TOL: f64 = 1e-10;
const MAX_SEGMENTS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    pub n_mech: usize,
    pub tail_tol: f64,
}

impl TruncationSpec {
    pub fn new(n_mech: usize, tail_tol: f64) -> Result<Self> {
        if n_mech < 4 {
            return Err(Error::InvalidConfig(format!(
                "n_mech must be at least 4 (got {n_mech})"
            )));
        }
        if tail_tol.is_nan() || tail_tol <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tail_tol must be positive (got {tail_tol})"
            )));
        }
        Ok(TruncationSpec { n_mech, tail_tol })
    }

    /// Displaced-amplitude rule `ceil(4 (r + 2 (N-1) g)² + 10)`, where `r` is
    /// the initial mechanical reach: `|α|` for coherent input, `|α| + e^{|ζ|}`
    /// for squeezed input and the largest retained P-function node for
    /// thermal input.
    pub fn for_config(cfg: &ModelConfig, g: f64) -> Self {
        let reach = match cfg.mech {
            MechInit::Coherent { alpha_abs, .. } => alpha_abs,
            MechInit::Squeezed {
                alpha_abs,
                zeta_abs,
                ..
            } => alpha_abs + zeta_abs.exp(),
            MechInit::Thermal { n_th } => n_th.sqrt() * thermal_node_radius(),
        };
        let shift = 2.0 * (cfg.n_phot.saturating_sub(1)) as f64 * g.abs();
        let n_mech = (4.0 * (reach + shift).powi(2) + 10.0).ceil() as usize;
        TruncationSpec {
            n_mech: n_mech.max(4),
            tail_tol: DEFAULT_TAIL_TOL,
        }
    }
}

fn thermal_node_radius() -> f64 {
    let rule = gauss_hermite(THERMAL_NODES);
    let mut r = 0.0f64;
    for &(x, wx) in &rule {
        for &(y, wy) in &rule {
            if wx * wy / std::f64::consts::PI >= THERMAL_PRUNE {
                r = r.max((x * x + y * y).sqrt());
            }
        }
    }
    r
}

/// Joint photon⊗phonon state stored as a factor `F` with `ρ_joint = F F†`.
/// Row `n * n_mech + k` is photon number `n`, phonon number `k`; pure states
/// have one column.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub g: f64,
    pub n_phot: usize,
    pub n_mech: usize,
    pub factor: CMatrix,
}

impl JointState {
    pub fn is_pure(&self) -> bool {
        self.factor.ncols() == 1
    }

    pub fn trace(&self) -> f64 {
        self.factor.norm_squared()
    }

    /// Full `(N n_mech)²` density matrix.
    pub fn density(&self) -> CMatrix {
        &self.factor * self.factor.adjoint()
    }

    /// Population in the top two phonon levels, summed over photon blocks.
    pub fn tail_population(&self) -> f64 {
        let mut tail = 0.0;
        for n in 0..self.n_phot {
            for k in self.n_mech.saturating_sub(2)..self.n_mech {
                tail += self.factor.row(n * self.n_mech + k).norm_squared();
            }
        }
        tail
    }
}

/// Initial mechanical state as a factor `S` with `ρ_mech = S S†`.
fn mechanical_factor(mech: &MechInit, dim: usize) -> CMatrix {
    match *mech {
        MechInit::Coherent { .. } => {
            let v = fock::coherent_vector(mech.alpha(), dim);
            CMatrix::from_column_slice(dim, 1, v.as_slice())
        }
        MechInit::Squeezed {
            zeta_abs,
            zeta_phase,
            ..
        } => {
            let v = fock::squeezed_vector(mech.alpha(), zeta_abs, zeta_phase, dim);
            CMatrix::from_column_slice(dim, 1, v.as_slice())
        }
        MechInit::Thermal { n_th } => {
            let (rho, _) = fock::thermal_mixture(n_th, dim, THERMAL_NODES, THERMAL_PRUNE);
            psd_sqrt(&rho)
        }
    }
}

/// Evolves the product state `Σ a_n |n⟩ ⊗ ρ_mech` for time `cfg.tau`, photon
/// block by photon block.
pub fn evolve_joint(
    cfg: &ModelConfig,
    a: &OpticalAmplitudes,
    g: f64,
    trunc: &TruncationSpec,
) -> Result<JointState> {
    cfg.validate()?;
    if a.len() != cfg.n_phot {
        return Err(Error::DimensionMismatch {
            expected: cfg.n_phot,
            found: a.len(),
        });
    }
    let dim = trunc.n_mech;
    let s = mechanical_factor(&cfg.mech, dim);
    let initial_tail: f64 = (dim - 2..dim).map(|k| s.row(k).norm_squared()).sum();
    if initial_tail > trunc.tail_tol {
        return Err(Error::TruncationOverflow {
            n_mech: dim,
            tail: initial_tail,
        });
    }
    let blocks: Vec<CMatrix> = a
        .as_slice()
        .par_iter()
        .enumerate()
        .map(|(n, &an)| (fock::block_propagator(n, g, cfg.tau, dim) * &s).map(|z| z * an))
        .collect();
    let cols = s.ncols();
    let mut factor = CMatrix::zeros(cfg.n_phot * dim, cols);
    for (n, b) in blocks.iter().enumerate() {
        factor.view_mut((n * dim, 0), (dim, cols)).copy_from(b);
    }
    let state = JointState {
        g,
        n_phot: cfg.n_phot,
        n_mech: dim,
        factor,
    };
    let tail = state.tail_population();
    if tail > trunc.tail_tol {
        return Err(Error::TruncationOverflow { n_mech: dim, tail });
    }
    Ok(state)
}

/// Field state `Tr_mech ρ_joint`.
pub fn partial_trace_mech(state: &JointState) -> FieldDensityMatrix {
    let (np, dim) = (state.n_phot, state.n_mech);
    let mut rho = CMatrix::zeros(np, np);
    for n in 0..np {
        let bn = state.factor.rows(n * dim, dim);
        for m in 0..=n {
            let bm = state.factor.rows(m * dim, dim);
            let z = bm.dotc(&bn);
            rho[(n, m)] = z;
            rho[(m, n)] = z.conj();
        }
    }
    FieldDensityMatrix { rho, g: state.g }
}

/// Oracle field state with automatic truncation: starts from
/// [`TruncationSpec::for_config`] and doubles `n_mech` while the tail check fails.
pub fn reduced_state(
    cfg: &ModelConfig,
    a: &OpticalAmplitudes,
    g: f64,
) -> Result<FieldDensityMatrix> {
    let mut trunc = TruncationSpec::for_config(cfg, g);
    loop {
        match evolve_joint(cfg, a, g, &trunc) {
            Ok(state) => return Ok(partial_trace_mech(&state)),
            Err(Error::TruncationOverflow { .. }) if trunc.n_mech * 2 <= MAX_N_MECH => {
                trunc.n_mech *= 2;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Closed-form evolution of photon block `n` acting on mechanical `|α⟩`:
/// `U_n |α⟩ = e^{i phase} |beta⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockClosedForm {
    /// `n² g² (τ - sin τ)`.
    pub big_phi: f64,
    /// Displacement generated by the coupling, `n g (e^{-iτ} - 1)`.
    pub alpha_n: Complex64,
    /// `alpha_n + α e^{-iτ}`.
    pub beta: Complex64,
    /// `big_phi + n g Im[α*(1 - e^{iτ})]`.
    pub phase: f64,
}

pub fn closed_form_block(alpha: Complex64, g: f64, tau: f64, n: usize) -> BlockClosedForm {
    let ng = n as f64 * g;
    let e_minus = Complex64::from_polar(1.0, -tau);
    let big_phi = ng * ng * (tau - tau.sin());
    let alpha_n = (e_minus - 1.0) * ng;
    let phase = big_phi + ng * (alpha.conj() * (1.0 - e_minus.conj())).im;
    BlockClosedForm {
        big_phi,
        alpha_n,
        beta: alpha_n + alpha * e_minus,
        phase,
    }
}

fn prior_breaks(prior: &GaussianPrior) -> Vec<f64> {
    (-10..=10)
        .map(|k| prior.g0 + k as f64 * prior.sigma)
        .collect()
}

/// `Γ_k = ∫ g^k p(g) ρ_F(g) dg` by adaptive quadrature on `[g0 - 10σ, g0 + 10σ]`.
pub fn gamma_quadrature(
    f: &FCoefficients,
    a: &OpticalAmplitudes,
    prior: &GaussianPrior,
    k: usize,
) -> Result<CMatrix> {
    if k > 2 {
        return Err(Error::InvalidConfig(format!(
            "moment order {k} out of range"
        )));
    }
    let integrand = |g: f64| -> Result<CMatrix> {
        let rho = build_density(a, f, g)?;
        let w = g.powi(k as i32) * prior.density(g);
        Ok(rho.rho.map(|z| z * w))
    };
    integrate_matrix(
        integrand,
        &prior_breaks(prior),
        GAMMA_QUAD_TOL,
        MAX_SEGMENTS,
    )
}

/// All three moment operators by quadrature.
pub fn gammas_quadrature(
    f: &FCoefficients,
    a: &OpticalAmplitudes,
    prior: &GaussianPrior,
) -> Result<MomentOperators> {
    Ok(MomentOperators {
        gamma0: gamma_quadrature(f, a, prior, 0)?,
        gamma1: gamma_quadrature(f, a, prior, 1)?,
        gamma2: gamma_quadrature(f, a, prior, 2)?,
    })
}

/// `C̄[M] = Tr ∫ p(g) (M - g I)² ρ_F(g) dg` by quadrature.
pub fn cost_quadrature(
    f: &FCoefficients,
    a: &OpticalAmplitudes,
    prior: &GaussianPrior,
    m: &CMatrix,
) -> Result<f64> {
    let n = m.nrows();
    let integrand = |g: f64| -> Result<CMatrix> {
        let rho = build_density(a, f, g)?;
        let s = m - CMatrix::identity(n, n).map(|z| z * g);
        let t = trace(&(&rho.rho * &s * &s)) * prior.density(g);
        Ok(CMatrix::from_element(1, 1, t))
    };
    let v = integrate_matrix(integrand, &prior_breaks(prior), COST_QUAD_TOL, MAX_SEGMENTS)?;
    real_part(v[(0, 0)], "cost quadrature")
}

/// `M = 2 ∫_0^∞ exp(-Γ0 x) Γ1 exp(-Γ0 x) dx` by quadrature with matrix
/// exponentials, truncated where `exp(-2 λ⁺_min x_max) < 1e-12`.
pub fn mmse_integral_quadrature(g: &MomentOperators) -> Result<CMatrix> {
    use crate::estimator::{NULL_SECTOR_RHS_TOL, NULL_SECTOR_TOL};
    let (lambda, v) = eigh(&g.gamma0);
    let n = lambda.len();
    let rhs = v.adjoint() * &g.gamma1 * &v;
    let mut null_part = CMatrix::zeros(n, n);
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
                null_part[(i, j)] = rhs[(i, j)];
            }
        }
    }
    let gamma1 = &g.gamma1 - &v * null_part * v.adjoint();
    let lambda_max = lambda.iter().cloned().fold(0.0f64, f64::max);
    let lambda_min = lambda
        .iter()
        .cloned()
        .filter(|&l| l > NULL_SECTOR_TOL)
        .fold(f64::INFINITY, f64::min);
    if !lambda_min.is_finite() {
        return Ok(CMatrix::zeros(n, n));
    }
    let x_max = (1e12f64).ln() / (2.0 * lambda_min);
    let mut breaks = vec![0.0];
    let mut x = 0.5 / lambda_max;
    while x < x_max {
        breaks.push(x);
        x *= 2.0;
    }
    breaks.push(x_max);
    let gamma0 = g.gamma0.clone();
    let integrand = |x: f64| -> Result<CMatrix> {
        let e = gamma0.map(|z| -z * x).exp();
        Ok((&e * &gamma1 * &e).map(|z| z * 2.0))
    };
    integrate_matrix(integrand, &breaks, MMSE_QUAD_TOL, MAX_SEGMENTS)
}

/// Central finite difference of the closed-form field state in g.
pub fn drho_finite_difference(
    f: &FCoefficients,
    a: &OpticalAmplitudes,
    g: f64,
    h: f64,
) -> Result<CMatrix> {
    let plus = build_density(a, f, g + h)?.rho;
    let minus = build_density(a, f, g - h)?.rho;
    Ok((plus - minus).map(|z| z / (2.0 * h)))
}

/// `x(g) = d/dg Tr{ρ² M} - g d/dg Tr{ρ²}` by central differences.
pub fn x_finite_difference(
    f: &FCoefficients,
    a: &OpticalAmplitudes,
    m: &CMatrix,
    g: f64,
    h: f64,
) -> Result<f64> {
    let x1 = |gg: f64| -> Result<f64> {
        let r = build_density(a, f, gg)?.rho;
        real_part(trace(&(&r * &r * m)), "x1")
    };
    let x2 = |gg: f64| -> Result<f64> {
        let r = build_density(a, f, gg)?.rho;
        real_part(trace(&(&r * &r)), "x2")
    };
    let d1 = (x1(g + h)? - x1(g - h)?) / (2.0 * h);
    let d2 = (x2(g + h)? - x2(g - h)?) / (2.0 * h);
    Ok(d1 - g * d2)
}

/// Spectral form of the mean-squared error, `Σ_k p_k (v_k - g)²` with
/// `p_k = ⟨v_k|ρ|v_k⟩`.
pub fn mse_spectral(m: &CMatrix, rho: &FieldDensityMatrix) -> Result<f64> {
    let (vals, vecs) = eigh(m);
    let mut total = 0.0;
    for (k, &vk) in vals.iter().enumerate() {
        let col = vecs.column(k);
        let p = col.dotc(&(&rho.rho * col));
        total += real_part(p, "outcome probability")? * (vk - rho.g).powi(2);
    }
    Ok(total)
}

/// Purity of a joint state, `Tr ρ²`, without forming the full matrix.
pub fn joint_purity(state: &JointState) -> f64 {
    let gram = state.factor.adjoint() * &state.factor;
    gram.iter().map(|z| z.norm_sqr()).sum()
}
