//! Squeezed mechanical states: how the squeezing magnitude and angle change
//! the best achievable cost.

use optomech_mmse::linalg::c;
use optomech_mmse::{find_tstar, MechInit, ModelConfig, OpticalAmplitudes, TimeWindow};
use std::f64::consts::PI;

fn main() -> optomech_mmse::Result<()> {
    let a = OpticalAmplitudes::uniform(2);
    println!("zeta_abs,zeta_phase,tau_star,cbar_over_sigma2");
    for r in [0.0, 0.25, 0.5, 1.0] {
        for theta in [0.0, PI / 2.0, PI] {
            let cfg = ModelConfig {
                mech: MechInit::squeezed(c(0.0, 0.0), r, theta),
                ..ModelConfig::default()
            };
            let t = find_tstar(&cfg, &a, TimeWindow::first_period(), 2048)?;
            println!(
                "{r},{theta:.4},{:.6},{:.6}",
                t.tau_star,
                t.cbar_at_star / (cfg.sigma * cfg.sigma)
            );
        }
    }
    Ok(())
}
