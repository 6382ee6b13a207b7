//! Prior-weighted moment operators `Gamma_k = ∫ g^k p(g) rho_F(g) dg`, k = 0, 1, 2,
//! evaluated entry by entry with the closed-form Gaussian integral.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{FCoefficients, OpticalAmplitudes};
use crate::linalg::{c, CMatrix};

/// Gaussian prior on the coupling, full real-line support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPrior {
    pub g0: f64,
    pub sigma: f64,
}

impl GaussianPrior {
    pub fn new(g0: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) || !g0.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "prior needs finite g0 and sigma > 0 (got g0 = {g0}, sigma = {sigma})"
            )));
        }
        Ok(GaussianPrior { g0, sigma })
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }

    pub fn density(&self, g: f64) -> f64 {
        let z = (g - self.g0) / self.sigma;
        (-0.5 * z * z).exp() / (self.sigma * (2.0 * std::f64::consts::PI).sqrt())
    }
}

/// Per-entry Gaussian-integral coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEntryCoeffs {
    /// `2 f2 sigma² + 1`.
    pub sigma_prime_sq: Complex64,
    /// Exponent gamma_{n,m}.
    pub gamma_nm: Complex64,
    pub a0: Complex64,
    pub a1: Complex64,
    pub a2: Complex64,
}

impl GammaEntryCoeffs {
    /// `A^{(k)} exp(-gamma)`, the factor multiplying `a_n conj(a_m)` in Gamma_k.
    pub fn weight(&self, k: usize) -> Complex64 {
        let a = match k {
            0 => self.a0,
            1 => self.a1,
            2 => self.a2,
            _ => panic!("moment order {k} out of range"),
        };
        a * (-self.gamma_nm).exp()
    }
}

/// Closed form of `∫ g^k p(g) exp(-g² f2 + g f1 - f0) dg` for entry (n, m).
///
/// `sigma'` is the principal square root of `sigma'²`; odd powers are formed as
/// `(sigma'²)^k sigma'` so all three moments share one branch.
pub fn gamma_entry_coeffs(
    f: &FCoefficients,
    prior: &GaussianPrior,
    n: usize,
    m: usize,
) -> Result<GammaEntryCoeffs> {
    let (f0, f1, f2) = (f.f0[(n, m)], f.f1[(n, m)], f.f2[(n, m)]);
    let s2 = prior.variance();
    let g0 = prior.g0;
    let sp2 = f2 * (2.0 * s2) + 1.0;
    if sp2.re <= 0.0 {
        return Err(Error::BranchFailure { n, m, re: sp2.re });
    }
    let sp = sp2.sqrt();
    let sp3 = sp2 * sp;
    let sp5 = sp2 * sp2 * sp;
    let mean_num = f1 * s2 + g0;
    let a0 = c(1.0, 0.0) / sp;
    let a1 = mean_num / sp3;
    let a2 = (mean_num * mean_num + sp2 * s2) / sp5;
    let gamma_nm =
        (f2 * (2.0 * g0 * g0) - f1 * (2.0 * g0) + f0 * sp2 * 2.0 - f1 * f1 * s2) / (sp2 * 2.0);
    Ok(GammaEntryCoeffs {
        sigma_prime_sq: sp2,
        gamma_nm,
        a0,
        a1,
        a2,
    })
}

/// The triple (Gamma_0, Gamma_1, Gamma_2).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentOperators {
    pub gamma0: CMatrix,
    pub gamma1: CMatrix,
    pub gamma2: CMatrix,
}

impl MomentOperators {
    pub fn dim(&self) -> usize {
        self.gamma0.nrows()
    }

    pub fn get(&self, k: usize) -> &CMatrix {
        match k {
            0 => &self.gamma0,
            1 => &self.gamma1,
            2 => &self.gamma2,
            _ => panic!("moment order {k} out of range"),
        }
    }
}

pub fn build_gammas(
    a: &OpticalAmplitudes,
    f: &FCoefficients,
    prior: &GaussianPrior,
) -> Result<MomentOperators> {
    let n = a.len();
    if f.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.dim(),
        });
    }
    let amp = a.as_slice();
    let mut gammas = [
        CMatrix::zeros(n, n),
        CMatrix::zeros(n, n),
        CMatrix::zeros(n, n),
    ];
    for r in 0..n {
        for col in 0..n {
            let coeffs = gamma_entry_coeffs(f, prior, r, col)?;
            let outer = amp[r] * amp[col].conj();
            for (k, gk) in gammas.iter_mut().enumerate() {
                gk[(r, col)] = outer * coeffs.weight(k);
            }
        }
    }
    let [gamma0, gamma1, gamma2] = gammas;
    Ok(MomentOperators {
        gamma0,
        gamma1,
        gamma2,
    })
}
