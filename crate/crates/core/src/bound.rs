//! Derivative of the field state with respect to g and the biased
//! Cramér–Rao-type lower bound on the mean-squared error of `M_min`.
//!
//! With `x(g) = Tr{(∂ρ ρ + ρ ∂ρ)(M - g I)}` and `D(g) = Tr{ρ (∂ρ)²}`, the
//! Cauchy–Schwarz inequality on the Hilbert–Schmidt pairs `(ρ^{1/2} ∂ρ, ρ^{1/2}(M - g I))`
//! gives `|x| <= 2 sqrt(D) sqrt(MSE)`, hence `MSE >= x² / (4 D)`.
//! [`printed_ratio`] keeps the square-root-free form `|x| / (2 D)` for comparison.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::estimator::check_dims;
use crate::field::{build_density, FCoefficients, FieldDensityMatrix, OpticalAmplitudes};
use crate::linalg::{frobenius, number_operator, psd_sqrt, real_trace, CMatrix};

/// Below this value of `Tr{ρ (∂ρ)²}` the bound is undefined.
pub const DEGENERATE_DENOM_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeData {
    /// `∂ρ_F/∂g` at the evaluation point.
    pub drho: CMatrix,
    /// Entry multipliers `-2 g f2 + f1`.
    pub coeffs: CMatrix,
}

/// `∂ρ_F/∂g` entrywise from the analytic exponent.
pub fn drho_dg(f: &FCoefficients, a: &OpticalAmplitudes, g: f64) -> Result<DerivativeData> {
    let rho = build_density(a, f, g)?;
    let coeffs = f.f2.map(|z| z * (-2.0 * g)) + &f.f1;
    let drho = rho.rho.component_mul(&coeffs);
    Ok(DerivativeData { drho, coeffs })
}

/// Coherent-state derivative written as nested commutators with the photon
/// number operator:
/// `-a1' [n,[n,ρ]] + a2' [n²,ρ] - a3' [n,ρ]`, where (rotating frame)
/// `a1 = g² (1 - cos τ)`, `a2 = i g² (τ - sin τ)` and
/// `a3 = -g [α*(1 - e^{iτ}) - α(1 - e^{-iτ})]`.
pub fn drho_commutator(alpha: Complex64, tau: f64, rho: &FieldDensityMatrix) -> CMatrix {
    let g = rho.g;
    let n = number_operator(rho.dim());
    let n2 = &n * &n;
    let comm = |a: &CMatrix, b: &CMatrix| a * b - b * a;
    let e_plus = Complex64::from_polar(1.0, tau);
    let da1 = Complex64::new(2.0 * g * (1.0 - tau.cos()), 0.0);
    let da2 = Complex64::new(0.0, 2.0 * g * (tau - tau.sin()));
    let da3 = -(alpha.conj() * (1.0 - e_plus) - alpha * (1.0 - e_plus.conj()));
    let inner = comm(&n, &rho.rho);
    comm(&n, &inner).map(|z| -z * da1) + comm(&n2, &rho.rho).map(|z| z * da2)
        - inner.map(|z| z * da3)
}

fn shifted(m: &CMatrix, g: f64) -> CMatrix {
    m - CMatrix::identity(m.nrows(), m.nrows()).map(|z| z * g)
}

/// `x(g) = Tr{(∂ρ ρ + ρ ∂ρ)(M - g I)}`.
pub fn x_of_g(rho: &FieldDensityMatrix, drho: &CMatrix, m: &CMatrix) -> Result<f64> {
    check_dims(m, rho)?;
    let sym = drho * &rho.rho + &rho.rho * drho;
    real_trace(&(sym * shifted(m, rho.g)), "x(g)")
}

/// `x1(g) = Tr{ρ² M}`.
pub fn x1(rho: &FieldDensityMatrix, m: &CMatrix) -> Result<f64> {
    real_trace(&(&rho.rho * &rho.rho * m), "x1(g)")
}

/// `x2(g) = Tr{ρ²}`.
pub fn x2(rho: &FieldDensityMatrix) -> Result<f64> {
    rho.purity()
}

/// `Tr{ρ (∂ρ)²}`.
pub fn derivative_information(rho: &FieldDensityMatrix, drho: &CMatrix) -> Result<f64> {
    real_trace(&(&rho.rho * drho * drho), "Tr{rho L^2}")
}

/// Lower bound `x² / (4 Tr{ρ (∂ρ)²})` on the mean-squared error.
pub fn lower_bound(rho: &FieldDensityMatrix, drho: &CMatrix, x: f64) -> Result<f64> {
    let denom = derivative_information(rho, drho)?;
    if denom < DEGENERATE_DENOM_TOL {
        return Err(Error::DegenerateDerivative { g: rho.g, denom });
    }
    Ok(x * x / (4.0 * denom))
}

/// The square-root-free ratio `|x| / (2 D)`.
pub fn printed_ratio(x: f64, denom: f64) -> f64 {
    x.abs() / (2.0 * denom)
}

/// `MSE = Tr{ρ (M - g I)²}`.
pub fn mse_direct(rho: &FieldDensityMatrix, m: &CMatrix) -> Result<f64> {
    check_dims(m, rho)?;
    let s = shifted(m, rho.g);
    real_trace(&(&rho.rho * &s * &s), "MSE")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HilbertSchmidtReport {
    /// `‖ρ^{1/2} ∂ρ‖_F`.
    pub rho_sqrt_drho: f64,
    /// `‖ρ^{1/2} M‖_F`.
    pub rho_sqrt_m: f64,
}

impl HilbertSchmidtReport {
    pub fn finite(&self) -> bool {
        self.rho_sqrt_drho.is_finite() && self.rho_sqrt_m.is_finite()
    }
}

/// Records the Hilbert–Schmidt norms required by the bound. They are always
/// finite in a truncated basis.
pub fn hilbert_schmidt_guard(
    rho: &FieldDensityMatrix,
    drho: &CMatrix,
    m: &CMatrix,
) -> HilbertSchmidtReport {
    let root = psd_sqrt(&rho.rho);
    HilbertSchmidtReport {
        rho_sqrt_drho: frobenius(&(&root * drho)),
        rho_sqrt_m: frobenius(&(&root * m)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    pub g: f64,
    pub x: f64,
    /// `Tr{ρ (∂ρ)²}`.
    pub denom: f64,
    pub lower_bound: f64,
    pub mse: f64,
}

impl BoundResult {
    pub fn printed_ratio(&self) -> f64 {
        printed_ratio(self.x, self.denom)
    }
}

/// Everything the bound needs at one coupling value.
pub fn evaluate_bound(
    f: &FCoefficients,
    a: &OpticalAmplitudes,
    m: &CMatrix,
    g: f64,
) -> Result<BoundResult> {
    let rho = build_density(a, f, g)?;
    let d = drho_dg(f, a, g)?;
    let x = x_of_g(&rho, &d.drho, m)?;
    let denom = derivative_information(&rho, &d.drho)?;
    let lb = lower_bound(&rho, &d.drho, x)?;
    let mse = mse_direct(&rho, m)?;
    Ok(BoundResult {
        g,
        x,
        denom,
        lower_bound: lb,
        mse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{f_coeffs_coherent, f_coeffs_thermal};
    use crate::linalg::{c, max_abs, max_abs_diff, trace};

    #[test]
    fn derivative_vanishes_at_zero_time() {
        let a = OpticalAmplitudes::uniform(3);
        let f = f_coeffs_coherent(c(0.4, 0.1), 0.0, 3);
        let d = drho_dg(&f, &a, 1.3).unwrap();
        assert!(max_abs(&d.drho) == 0.0);
    }

    #[test]
    fn derivative_is_traceless_hermitian_with_zero_diagonal() {
        let a = OpticalAmplitudes::uniform(3);
        let f = f_coeffs_thermal(0.5, 1.2, 3);
        let d = drho_dg(&f, &a, 0.8).unwrap();
        assert!(crate::linalg::hermitian_residual(&d.drho) < 1e-12);
        assert!(trace(&d.drho).norm() < 1e-10);
        for n in 0..3 {
            assert_eq!(d.drho[(n, n)], c(0.0, 0.0));
        }
    }

    #[test]
    fn commutator_form_matches_elementwise() {
        let alpha = c(1.0, 1.0);
        let tau = 0.9;
        let a = OpticalAmplitudes::uniform(4);
        let f = f_coeffs_coherent(alpha, tau, 4);
        for g in [0.2, 1.0, 1.7] {
            let rho = build_density(&a, &f, g).unwrap();
            let d = drho_dg(&f, &a, g).unwrap();
            assert!(max_abs_diff(&d.drho, &drho_commutator(alpha, tau, &rho)) < 1e-10);
        }
    }

    #[test]
    fn zero_time_bound_is_degenerate() {
        let a = OpticalAmplitudes::uniform(2);
        let f = f_coeffs_coherent(c(0.0, 0.0), 0.0, 2);
        let m = a.projector();
        let rho = build_density(&a, &f, 1.0).unwrap();
        let d = drho_dg(&f, &a, 1.0).unwrap();
        let x = x_of_g(&rho, &d.drho, &m).unwrap();
        assert_eq!(x, 0.0);
        assert!(matches!(
            lower_bound(&rho, &d.drho, x),
            Err(Error::DegenerateDerivative { .. })
        ));
    }

    #[test]
    fn scalar_estimator_at_truth_has_zero_x() {
        let a = OpticalAmplitudes::uniform(2);
        let f = f_coeffs_coherent(c(0.0, 0.0), 1.0, 2);
        let g = 0.7;
        let rho = build_density(&a, &f, g).unwrap();
        let d = drho_dg(&f, &a, g).unwrap();
        let m = CMatrix::identity(2, 2).map(|z| z * g);
        assert!(x_of_g(&rho, &d.drho, &m).unwrap().abs() < 1e-15);
        let lb = lower_bound(&rho, &d.drho, 0.0).unwrap();
        assert_eq!(lb, 0.0);
    }

    #[test]
    fn zero_time_mse_is_squared_offset() {
        let a = OpticalAmplitudes::uniform(2);
        let f = f_coeffs_coherent(c(0.0, 0.0), 0.0, 2);
        let m = a.projector();
        for g in [0.0, 1.0, 2.5] {
            let rho = build_density(&a, &f, g).unwrap();
            assert!((mse_direct(&rho, &m).unwrap() - (1.0 - g).powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn hilbert_schmidt_norms_finite_and_zero_at_rest() {
        let a = OpticalAmplitudes::uniform(2);
        let f = f_coeffs_coherent(c(0.0, 0.0), 0.0, 2);
        let rho = build_density(&a, &f, 1.0).unwrap();
        let d = drho_dg(&f, &a, 1.0).unwrap();
        let r = hilbert_schmidt_guard(&rho, &d.drho, &a.projector());
        assert!(r.finite());
        assert_eq!(r.rho_sqrt_drho, 0.0);
        assert!((r.rho_sqrt_m - 1.0).abs() < 1e-12);
    }
}
