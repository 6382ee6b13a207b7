//! Quadrature rules used by the oracles: globally adaptive Gauss–Kronrod
//! (7/15) for matrix-valued integrands, and Gauss–Hermite nodes.
#![allow(clippy::excessive_precision)]

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, CMatrix};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
/// Gauss weights on the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Segment {
    lo: f64,
    hi: f64,
    value: CMatrix,
    error: f64,
}

fn kronrod<F>(f: &F, lo: f64, hi: f64) -> Result<Segment>
where
    F: Fn(f64) -> Result<CMatrix>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut k = fc.map(|z| z * WGK[7]);
    let mut g = fc.map(|z| z * WG[3]);
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx)? + f(center + dx)?;
        k += s.map(|z| z * WGK[j]);
        if j % 2 == 1 {
            g += s.map(|z| z * WG[j / 2]);
        }
    }
    let value = k.map(|z| z * half);
    let error = max_abs(&(k - g)) * half.abs();
    Ok(Segment {
        lo,
        hi,
        value,
        error,
    })
}

/// Integrates a matrix-valued function over `[lo, hi]` split at `breaks`,
/// bisecting the worst segment until the summed error estimate drops
/// below `abs_tol`.
pub fn integrate_matrix<F>(
    f: F,
    breaks: &[f64],
    abs_tol: f64,
    max_segments: usize,
) -> Result<CMatrix>
where
    F: Fn(f64) -> Result<CMatrix>,
{
    assert!(breaks.len() >= 2);
    let mut segments = Vec::new();
    for w in breaks.windows(2) {
        segments.push(kronrod(&f, w[0], w[1])?);
    }
    loop {
        let total_error: f64 = segments.iter().map(|s| s.error).sum();
        if total_error <= abs_tol {
            break;
        }
        if segments.len() >= max_segments {
            return Err(Error::QuadratureNonConvergence {
                intervals: segments.len(),
                error: total_error,
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.lo + s.hi);
        segments.push(kronrod(&f, s.lo, mid)?);
        segments.push(kronrod(&f, mid, s.hi)?);
    }
    let mut sum = segments[0].value.clone();
    for s in &segments[1..] {
        sum += &s.value;
    }
    Ok(sum)
}

/// Gauss–Hermite nodes and weights for the weight `exp(-x²)` by the
/// Golub–Welsch eigenvalue method. Weights sum to `sqrt(pi)`.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = jacobi.symmetric_eigen();
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            (
                eig.eigenvalues[i],
                sqrt_pi * eig.eigenvectors[(0, i)].powi(2),
            )
        })
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}
