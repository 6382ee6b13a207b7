//! Average minimum cost against interaction time for a coherent mechanical
//! state, for a few displacement magnitudes.

use optomech_mmse::estimator::cbar_at;
use optomech_mmse::field::{MechInit, ModelConfig, OpticalAmplitudes};
use optomech_mmse::linalg::c;
use std::f64::consts::PI;

fn main() -> optomech_mmse::Result<()> {
    let a = OpticalAmplitudes::uniform(2);
    let alphas = [0.0, 1.0, 2.0];
    println!("tau,{}", alphas.map(|x| format!("alpha={x}")).join(","));
    for i in 0..=32 {
        let tau = 2.0 * PI * i as f64 / 32.0;
        let row = alphas
            .iter()
            .map(|&r| {
                let cfg = ModelConfig {
                    mech: MechInit::coherent(c(r, 0.0)),
                    ..ModelConfig::default()
                };
                cbar_at(&cfg, &a, tau).map(|v| format!("{v:.6}"))
            })
            .collect::<optomech_mmse::Result<Vec<_>>>()?;
        println!("{tau:.4},{}", row.join(","));
    }
    Ok(())
}
