//! Reduced optical-field state of the single-mode optomechanical system.
//!
//! Every photon-number block evolves under `n g (b† + b) + b†b` (rotating frame,
//! frequencies in units of the mechanical frequency), so the field matrix has
//! entries
//!
//! ```text
//! A[n][m] = a_n conj(a_m) exp(-g² f2[n][m] + g f1[n][m] - f0[n][m])
//! ```
//!
//! with the three coefficient matrices depending only on the dimensionless
//! time `tau` and on the initial mechanical state.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_residual, real_trace, CMatrix};

/// Initial state of the mechanical oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MechInit {
    Coherent {
        alpha_abs: f64,
        alpha_phase: f64,
    },
    Thermal {
        n_th: f64,
    },
    /// Displaced squeezed vacuum `D(alpha) S(zeta) |0>`.
    Squeezed {
        alpha_abs: f64,
        alpha_phase: f64,
        zeta_abs: f64,
        zeta_phase: f64,
    },
}

impl MechInit {
    pub fn ground() -> Self {
        MechInit::Coherent {
            alpha_abs: 0.0,
            alpha_phase: 0.0,
        }
    }

    pub fn coherent(alpha: Complex64) -> Self {
        MechInit::Coherent {
            alpha_abs: alpha.norm(),
            alpha_phase: alpha.arg(),
        }
    }

    pub fn squeezed(alpha: Complex64, zeta_abs: f64, zeta_phase: f64) -> Self {
        MechInit::Squeezed {
            alpha_abs: alpha.norm(),
            alpha_phase: alpha.arg(),
            zeta_abs,
            zeta_phase,
        }
    }

    /// Coherent displacement amplitude (zero for thermal states).
    pub fn alpha(&self) -> Complex64 {
        match *self {
            MechInit::Coherent {
                alpha_abs,
                alpha_phase,
            }
            | MechInit::Squeezed {
                alpha_abs,
                alpha_phase,
                ..
            } => Complex64::from_polar(alpha_abs, alpha_phase),
            MechInit::Thermal { .. } => c(0.0, 0.0),
        }
    }

    /// True when the initial state has no coherent displacement, which makes
    /// the field state an even function of g.
    pub fn is_undisplaced(&self) -> bool {
        self.alpha().norm() == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64, name: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be finite")))
            }
        };
        match *self {
            MechInit::Coherent {
                alpha_abs,
                alpha_phase,
            } => {
                finite(alpha_abs, "alpha_abs")?;
                finite(alpha_phase, "alpha_phase")?;
                if alpha_abs < 0.0 {
                    return Err(Error::InvalidConfig("alpha_abs must be >= 0".into()));
                }
            }
            MechInit::Thermal { n_th } => {
                finite(n_th, "n_th")?;
                if n_th < 0.0 {
                    return Err(Error::InvalidConfig("n_th must be >= 0".into()));
                }
            }
            MechInit::Squeezed {
                alpha_abs,
                alpha_phase,
                zeta_abs,
                zeta_phase,
            } => {
                for (x, name) in [
                    (alpha_abs, "alpha_abs"),
                    (alpha_phase, "alpha_phase"),
                    (zeta_abs, "zeta_abs"),
                    (zeta_phase, "zeta_phase"),
                ] {
                    finite(x, name)?;
                }
                if alpha_abs < 0.0 || zeta_abs < 0.0 {
                    return Err(Error::InvalidConfig(
                        "alpha_abs and zeta_abs must be >= 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Dimensionless model parameters: couplings in units of the mechanical
/// frequency, `tau` the interaction time multiplied by it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    /// Prior mean of g.
    pub g0: f64,
    /// Prior standard deviation of g.
    pub sigma: f64,
    pub tau: f64,
    /// Photon-basis dimension N.
    pub n_phot: usize,
    pub mech: MechInit,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            g0: 1.0,
            sigma: 2f64.powf(-0.25),
            tau: 0.0,
            n_phot: 2,
            mech: MechInit::ground(),
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig("sigma must be > 0".into()));
        }
        if !self.g0.is_finite() {
            return Err(Error::InvalidConfig("g0 must be finite".into()));
        }
        if self.n_phot < 2 {
            return Err(Error::InvalidConfig("n_phot must be >= 2".into()));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidConfig("tau must be >= 0".into()));
        }
        self.mech.validate()
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn f_coeffs(&self) -> Result<FCoefficients> {
        f_coeffs(&self.mech, self.tau, self.n_phot)
    }
}

/// Photon-number amplitudes `a_n` of the initial optical state.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalAmplitudes(Vec<Complex64>);

impl OpticalAmplitudes {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(a: Vec<Complex64>) -> Result<Self> {
        if a.len() < 2 {
            return Err(Error::InvalidConfig(
                "need at least two photon amplitudes".into(),
            ));
        }
        let norm: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(OpticalAmplitudes(a))
    }

    pub fn from_real(a: &[f64]) -> Result<Self> {
        Self::new(a.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// Equal-weight superposition `(|0> + ... + |N-1>) / sqrt(N)`.
    pub fn uniform(n: usize) -> Self {
        let w = if n == 2 {
            FRAC_1_SQRT_2
        } else {
            1.0 / (n as f64).sqrt()
        };
        OpticalAmplitudes(vec![c(w, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    /// `|psi><psi|`.
    pub fn projector(&self) -> CMatrix {
        let n = self.len();
        CMatrix::from_fn(n, n, |r, col| self.0[r] * self.0[col].conj())
    }
}

/// The coefficient matrices f0, f1, f2 over index pairs (n, m).
#[derive(Debug, Clone, PartialEq)]
pub struct FCoefficients {
    pub f0: CMatrix,
    pub f1: CMatrix,
    pub f2: CMatrix,
}

impl FCoefficients {
    fn zeros(n: usize) -> Self {
        FCoefficients {
            f0: CMatrix::zeros(n, n),
            f1: CMatrix::zeros(n, n),
            f2: CMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.f0.nrows()
    }

    /// Scalar exponent `-g² f2 + g f1 - f0` of entry (n, m).
    pub fn exponent(&self, g: f64, n: usize, m: usize) -> Complex64 {
        -self.f2[(n, m)] * (g * g) + self.f1[(n, m)] * g - self.f0[(n, m)]
    }

    /// Largest violation of `f[n][m] = conj(f[m][n])` over all three matrices,
    /// with its location.
    pub fn conjugate_symmetry_residual(&self) -> (f64, usize, usize) {
        let n = self.dim();
        let mut worst = (0.0, 0, 0);
        for f in [&self.f0, &self.f1, &self.f2] {
            for r in 0..n {
                for col in 0..n {
                    let diff =
                        (f[(r, col)] - f[(col, r)].conj()).norm() / (1.0 + f[(r, col)].norm());
                    if diff > worst.0 {
                        worst = (diff, r, col);
                    }
                }
            }
        }
        worst
    }
}

const CONJ_TOL: f64 = 1e-12;

fn coherent_linear(alpha: Complex64, tau: f64) -> Complex64 {
    let e_plus = Complex64::from_polar(1.0, tau);
    alpha.conj() * (1.0 - e_plus) - alpha * (1.0 - e_plus.conj())
}

/// Coefficients for a coherent initial mechanical state (rotating frame, so
/// f0 vanishes identically).
pub fn f_coeffs_coherent(alpha: Complex64, tau: f64, n_phot: usize) -> FCoefficients {
    let mut f = FCoefficients::zeros(n_phot);
    let lin = coherent_linear(alpha, tau);
    let re2 = 1.0 - tau.cos();
    let im2 = tau - tau.sin();
    for n in 0..n_phot {
        for m in 0..n_phot {
            let d = n as f64 - m as f64;
            let s = (n * n) as f64 - (m * m) as f64;
            f.f1[(n, m)] = lin * d;
            f.f2[(n, m)] = c(re2 * d * d, -im2 * s);
        }
    }
    f
}

/// Coefficients for a thermal initial mechanical state with mean phonon
/// number `n_th`: the real part of f2 is broadened by `2 n_th + 1` and the
/// linear term averages out.
pub fn f_coeffs_thermal(n_th: f64, tau: f64, n_phot: usize) -> FCoefficients {
    let mut f = FCoefficients::zeros(n_phot);
    let re2 = (2.0 * n_th + 1.0) * (1.0 - tau.cos());
    let im2 = tau - tau.sin();
    for n in 0..n_phot {
        for m in 0..n_phot {
            let d = n as f64 - m as f64;
            let s = (n * n) as f64 - (m * m) as f64;
            f.f2[(n, m)] = c(re2 * d * d, -im2 * s);
        }
    }
    f
}

/// Coefficients for a displaced squeezed initial mechanical state.
///
/// Block n carries `D(beta_n) S(zeta e^{-2i tau}) |0>` up to the same phase as
/// in the coherent case, and the overlap of two such states reduces to
/// `<0| S† D(delta) S |0> = exp(-|delta cosh r + conj(delta) e^{i theta'} sinh r|² / 2)`
/// with `delta = (n - m) g (e^{-i tau} - 1)` and `theta' = theta - 2 tau`.
/// Only the real part of f2 differs from the coherent case.
pub fn f_coeffs_squeezed(
    alpha: Complex64,
    zeta_abs: f64,
    zeta_phase: f64,
    tau: f64,
    n_phot: usize,
) -> Result<FCoefficients> {
    let (ch, sh) = (zeta_abs.cosh(), zeta_abs.sinh());
    if !(ch.is_finite() && sh.is_finite()) {
        return Err(Error::DegenerateSqueezing(format!(
            "cosh/sinh of |zeta| = {zeta_abs} overflow"
        )));
    }
    let u = Complex64::from_polar(1.0, -tau) - 1.0;
    let rotated = Complex64::from_polar(sh, zeta_phase - 2.0 * tau);
    let re2 = 0.5 * (u * ch + u.conj() * rotated).norm_sqr();
    let mut f = f_coeffs_coherent(alpha, tau, n_phot);
    let im2 = tau - tau.sin();
    for n in 0..n_phot {
        for m in 0..n_phot {
            let d = n as f64 - m as f64;
            let s = (n * n) as f64 - (m * m) as f64;
            f.f2[(n, m)] = c(re2 * d * d, -im2 * s);
        }
    }
    Ok(f)
}

/// Auxiliary coefficients of the printed squeezed-state expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedAux {
    pub chi1: Complex64,
    pub chi2: Complex64,
    pub chi3: Complex64,
    pub chi4: Complex64,
    pub xi0: f64,
    pub xi1: f64,
    pub xi2: Complex64,
    pub i0: Complex64,
    pub i1: Complex64,
    pub i2: Complex64,
}

/// Evaluates the printed chi/xi/I auxiliary coefficients for entry (n, m),
/// with `z = theta - 2 tau`, `z1 = tau - phi`, `z2 = tau - phi - theta`.
pub fn squeezed_aux(
    alpha: Complex64,
    zeta_abs: f64,
    zeta_phase: f64,
    tau: f64,
    n: usize,
    m: usize,
) -> SqueezedAux {
    let (aa, phi) = (alpha.norm(), alpha.arg());
    let theta = zeta_phase;
    let t = zeta_abs.tanh();
    let (nf, mf) = (n as f64, m as f64);
    let e_minus = Complex64::from_polar(1.0, -tau);
    let e_plus = Complex64::from_polar(1.0, tau);
    let rot = Complex64::from_polar(1.0, theta - tau);

    let chi1 = (e_minus - 1.0) * nf - (e_plus - 1.0) * mf;
    let chi2 = (e_minus - 1.0) * nf + (e_plus - 1.0) * mf;
    let chi3 = (1.0 - e_minus) * rot * nf - (1.0 - e_plus) * rot.conj() * mf;
    let chi4 = (1.0 - e_minus) * rot * nf + (1.0 - e_plus) * rot.conj() * mf;

    let z = theta - 2.0 * tau;
    let z1 = tau - phi;
    let z2 = tau - phi - theta;
    let denom = 1.0 - t * z.cos();
    let xi0 = 1.0 / (4.0 * denom);
    let xi1 = denom / (4.0 * (1.0 - t * t));
    let xi2 = c(0.0, t * z.sin() / denom);

    let sin_sum = z1.sin() + t * z2.sin();
    let cos_sum = z1.cos() + t * z2.cos();
    let p = chi1 + chi3 * (t * t);
    let q = chi2 + chi4 * (t * t) + xi2 * p;
    let i = c(0.0, 1.0);
    let tail = cos_sum - i * xi2 * sin_sum;

    let i2 = p * p * xi0 - q * q * xi1;
    let i1 = (p * i * sin_sum * xi0 + q * tail * xi1) * (4.0 * aa);
    let i0 = (tail * tail * xi1 + xi0 * sin_sum * sin_sum) * (4.0 * aa * aa);

    SqueezedAux {
        chi1,
        chi2,
        chi3,
        chi4,
        xi0,
        xi1,
        xi2,
        i0,
        i1,
        i2,
    }
}

/// Squeezed-state coefficients assembled literally from the printed
/// expansion and [`squeezed_aux`]. Kept for residual reporting against the
/// brute-force oracle; [`f_coeffs_squeezed`] is the path used everywhere else.
pub fn f_coeffs_squeezed_printed(
    alpha: Complex64,
    zeta_abs: f64,
    zeta_phase: f64,
    tau: f64,
    n_phot: usize,
) -> Result<FCoefficients> {
    let t = zeta_abs.tanh();
    let theta = zeta_phase;
    let phi = alpha.arg();
    let aa = alpha.norm();
    if (1.0 - t * t) <= f64::MIN_POSITIVE || !zeta_abs.cosh().is_finite() {
        return Err(Error::DegenerateSqueezing(format!(
            "1 - tanh²|zeta| underflows at |zeta| = {zeta_abs}"
        )));
    }
    let e_minus = Complex64::from_polar(1.0, -tau);
    let e_plus = Complex64::from_polar(1.0, tau);
    let ei_theta = Complex64::from_polar(1.0, theta);
    let log_term = (zeta_abs.cosh() * (1.0 - t * t).sqrt()).ln();

    let mut f = FCoefficients::zeros(n_phot);
    for n in 0..n_phot {
        for m in 0..n_phot {
            let aux = squeezed_aux(alpha, zeta_abs, zeta_phase, tau, n, m);
            let (nf, mf) = (n as f64, m as f64);
            f.f0[(n, m)] = c(
                aa * aa * (1.0 + t * (theta - 2.0 * phi).cos()) + log_term,
                0.0,
            ) - aux.i0;
            f.f1[(n, m)] = alpha.conj() * (1.0 - e_plus) * (nf - mf)
                + aux.i1
                + (alpha.conj() * (1.0 - e_minus) * ei_theta * nf
                    + alpha * (1.0 - e_plus) * ei_theta.conj() * mf)
                    * (t / 2.0);
            f.f2[(n, m)] = c(0.0, -(tau - tau.sin()) * (nf * nf - mf * mf))
                + ((e_minus - 1.0).powi(2) * ei_theta * (nf * nf)
                    + (e_plus - 1.0).powi(2) * ei_theta.conj() * (mf * mf))
                    * (t / 2.0)
                + c((1.0 - tau.cos()) * (nf * nf + mf * mf), 0.0)
                + aux.i2;
        }
    }
    Ok(f)
}

/// Dispatches on the mechanical initial state.
pub fn f_coeffs(mech: &MechInit, tau: f64, n_phot: usize) -> Result<FCoefficients> {
    mech.validate()?;
    Ok(match *mech {
        MechInit::Coherent { .. } => f_coeffs_coherent(mech.alpha(), tau, n_phot),
        MechInit::Thermal { n_th } => f_coeffs_thermal(n_th, tau, n_phot),
        MechInit::Squeezed {
            zeta_abs,
            zeta_phase,
            ..
        } => f_coeffs_squeezed(mech.alpha(), zeta_abs, zeta_phase, tau, n_phot)?,
    })
}

/// Reduced field density matrix at coupling `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDensityMatrix {
    pub rho: CMatrix,
    pub g: f64,
}

impl FieldDensityMatrix {
    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn hermitian_residual(&self) -> f64 {
        hermitian_residual(&self.rho)
    }

    pub fn trace(&self) -> Result<f64> {
        real_trace(&self.rho, "Tr rho_F")
    }

    pub fn purity(&self) -> Result<f64> {
        real_trace(&(&self.rho * &self.rho), "Tr rho_F^2")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        crate::linalg::eigh(&self.rho).0[0]
    }
}

/// `rho_F(g)` from the amplitudes and coefficient matrices. The scalar
/// exponent is formed before exponentiation.
pub fn build_density(
    a: &OpticalAmplitudes,
    f: &FCoefficients,
    g: f64,
) -> Result<FieldDensityMatrix> {
    let n = a.len();
    if f.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.dim(),
        });
    }
    let (residual, rn, rm) = f.conjugate_symmetry_residual();
    if residual > CONJ_TOL {
        return Err(Error::NonHermitianInput {
            n: rn,
            m: rm,
            residual,
        });
    }
    let amp = a.as_slice();
    let rho = CMatrix::from_fn(n, n, |r, col| {
        amp[r] * amp[col].conj() * f.exponent(g, r, col).exp()
    });
    Ok(FieldDensityMatrix { rho, g })
}
