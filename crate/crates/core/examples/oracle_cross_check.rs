//! Compares the closed-form reduced optical state and moment operators with a
//! brute-force evolution in a truncated Fock space and direct quadrature.

use optomech_mmse::linalg::{c, max_abs_diff};
use optomech_mmse::oracle::{gammas_quadrature, reduced_state};
use optomech_mmse::{
    build_density, build_gammas, GaussianPrior, MechInit, ModelConfig, OpticalAmplitudes,
};

fn main() -> optomech_mmse::Result<()> {
    let a = OpticalAmplitudes::uniform(3);
    let mechs = [
        ("coherent 1+i", MechInit::coherent(c(1.0, 1.0))),
        ("thermal 1", MechInit::Thermal { n_th: 1.0 }),
        ("squeezed 0.5", MechInit::squeezed(c(1.0, 0.0), 0.5, 1.0)),
    ];
    println!(
        "{:<14}{:>6}{:>14}{:>14}",
        "state", "g", "state diff", "moment diff"
    );
    for (label, mech) in mechs {
        let cfg = ModelConfig {
            mech,
            n_phot: 3,
            tau: 1.0,
            ..ModelConfig::default()
        };
        let f = cfg.f_coeffs()?;
        let prior = GaussianPrior::new(cfg.g0, cfg.sigma)?;
        let closed = build_gammas(&a, &f, &prior)?;
        let quad = gammas_quadrature(&f, &a, &prior)?;
        let dm = (0..3)
            .map(|k| max_abs_diff(closed.get(k), quad.get(k)))
            .fold(0.0, f64::max);
        for g in [0.5, 1.0, 2.0] {
            let ds = max_abs_diff(
                &build_density(&a, &f, g)?.rho,
                &reduced_state(&cfg, &a, g)?.rho,
            );
            println!("{label:<14}{g:>6}{ds:>14.2e}{dm:>14.2e}");
        }
    }
    Ok(())
}
