//! Thermal mechanical states: optimal time and cost for growing occupation.

use optomech_mmse::{find_tstar, MechInit, ModelConfig, OpticalAmplitudes, TimeWindow};

fn main() -> optomech_mmse::Result<()> {
    let a = OpticalAmplitudes::uniform(2);
    println!("n_th,tau_star,cbar_over_sigma2,at_edge");
    for n_th in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let cfg = ModelConfig {
            mech: MechInit::Thermal { n_th },
            ..ModelConfig::default()
        };
        let t = find_tstar(&cfg, &a, TimeWindow::first_period(), 4096)?;
        println!(
            "{n_th},{:.6},{:.6},{}",
            t.tau_star,
            t.cbar_at_star / (cfg.sigma * cfg.sigma),
            t.at_edge
        );
    }
    Ok(())
}
