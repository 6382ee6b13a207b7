//! Mechanical Fock-basis vectors and per-photon-block propagators.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::{c, CMatrix, CVector};

/// `|alpha⟩` truncated to `dim` levels.
pub fn coherent_vector(alpha: Complex64, dim: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    let mut ck = c((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for k in 0..dim {
        v[k] = ck;
        ck = ck * alpha / ((k + 1) as f64).sqrt();
    }
    v
}

/// Displaced squeezed vacuum `D(alpha) S(zeta) |0⟩` with `zeta = r e^{i theta}`,
/// expanded by the three-term recurrence of its Fock amplitudes.
pub fn squeezed_vector(alpha: Complex64, r: f64, theta: f64, dim: usize) -> CVector {
    let (ch, sh) = (r.cosh(), r.sinh());
    let e_theta = Complex64::from_polar(1.0, theta);
    let gamma = alpha * ch + alpha.conj() * e_theta * sh;
    let mut v = CVector::zeros(dim);
    if dim == 0 {
        return v;
    }
    v[0] = c((-0.5 * alpha.norm_sqr()).exp() / ch.sqrt(), 0.0)
        * (-0.5 * alpha.conj() * alpha.conj() * e_theta * r.tanh()).exp();
    if dim > 1 {
        v[1] = gamma * v[0] / ch;
    }
    for k in 1..dim.saturating_sub(1) {
        let kf = k as f64;
        v[k + 1] = (gamma * v[k] - e_theta * sh * kf.sqrt() * v[k - 1]) / (ch * (kf + 1.0).sqrt());
    }
    v
}

/// Thermal mechanical state as a Glauber–Sudarshan mixture of coherent
/// projectors, `∫ d²γ P(γ) |γ⟩⟨γ|`, sampled on a tensor Gauss–Hermite grid.
/// Nodes whose weight falls below `prune` are dropped. Returns the matrix and
/// the largest retained `|γ|`.
pub fn thermal_mixture(n_th: f64, dim: usize, nodes: usize, prune: f64) -> (CMatrix, f64) {
    let rule = super::quad::gauss_hermite(nodes);
    let scale = n_th.sqrt();
    let mut rho = CMatrix::zeros(dim, dim);
    let mut reach = 0.0f64;
    for &(x, wx) in &rule {
        for &(y, wy) in &rule {
            let w = wx * wy / std::f64::consts::PI;
            if w < prune {
                continue;
            }
            let gamma = c(scale * x, scale * y);
            reach = reach.max(gamma.norm());
            let v = coherent_vector(gamma, dim);
            rho.gerc(c(w, 0.0), &v, &v, c(1.0, 0.0));
        }
    }
    (rho, reach)
}

/// `exp(-i H_n tau)` for `H_n = b†b + n g (b + b†)` truncated to `dim` levels.
pub fn block_propagator(n: usize, g: f64, tau: f64, dim: usize) -> CMatrix {
    let coupling = n as f64 * g;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..dim {
        h[(k, k)] = k as f64;
        if k + 1 < dim {
            let off = coupling * ((k + 1) as f64).sqrt();
            h[(k, k + 1)] = off;
            h[(k + 1, k)] = off;
        }
    }
    let eig = h.symmetric_eigen();
    let v = eig.eigenvectors.map(|x| c(x, 0.0));
    let mut scaled = v.clone();
    for (j, lam) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -lam * tau);
        for i in 0..dim {
            scaled[(i, j)] *= phase;
        }
    }
    scaled * v.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_vector_is_normalized() {
        let v = coherent_vector(c(1.5, -0.7), 60);
        assert!((v.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn squeezed_vector_normalized_and_reduces_to_coherent() {
        let v = squeezed_vector(c(0.8, 0.3), 0.5, 1.1, 80);
        assert!((v.norm() - 1.0).abs() < 1e-13);
        let s = squeezed_vector(c(0.8, 0.3), 0.0, 1.1, 40);
        let cv = coherent_vector(c(0.8, 0.3), 40);
        assert!((s - cv).camax() < 1e-15);
    }

    #[test]
    fn squeezed_vacuum_quadrature_variance() {
        // theta = 0: Var(X) = e^{-2r}/4 with X = (b + b†)/2
        let r = 0.4;
        let dim = 80;
        let v = squeezed_vector(c(0.0, 0.0), r, 0.0, dim);
        let mut b = CMatrix::zeros(dim, dim);
        for k in 1..dim {
            b[(k - 1, k)] = c((k as f64).sqrt(), 0.0);
        }
        let x = (&b + b.adjoint()).map(|z| z * 0.5);
        let var = (v.adjoint() * &x * &x * &v)[(0, 0)].re;
        assert!((var - (-2.0 * r).exp() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn propagator_is_unitary_and_free_at_zero_coupling() {
        let u = block_propagator(2, 0.7, 1.3, 30);
        let id = CMatrix::identity(30, 30);
        assert!((u.adjoint() * &u - &id).camax() < 1e-12);
        let free = block_propagator(0, 0.7, 1.3, 10);
        for k in 0..10 {
            assert!((free[(k, k)] - Complex64::from_polar(1.0, -1.3 * k as f64)).norm() < 1e-12);
        }
    }

    #[test]
    fn thermal_mixture_has_bose_einstein_populations() {
        let n_th = 0.5;
        let (rho, _) = thermal_mixture(n_th, 40, 40, 1e-16);
        for k in 0..8 {
            let p = n_th.powi(k as i32) / (n_th + 1.0).powi(k as i32 + 1);
            assert!((rho[(k, k)].re - p).abs() < 1e-7, "k = {k}");
        }
        assert!(rho[(0, 1)].norm() < 1e-10);
    }
}
