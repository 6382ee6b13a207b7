//! Average estimate, bias and mean-square error of the optimal measurement as
//! functions of the true coupling.

use optomech_mmse::bound::mse_direct;
use optomech_mmse::estimator::bias;
use optomech_mmse::{build_density, find_tstar, ModelConfig, OpticalAmplitudes, TimeWindow};

fn main() -> optomech_mmse::Result<()> {
    let cfg = ModelConfig::default();
    let a = OpticalAmplitudes::uniform(2);
    let t = find_tstar(&cfg, &a, TimeWindow::first_period(), 4096)?;
    let f = cfg.with_tau(t.tau_star).f_coeffs()?;
    let m = &t.solution.m_min;
    println!("g,h,bias,mse");
    for i in 0..=24 {
        let g = -3.0 + 0.25 * i as f64;
        let rho = build_density(&a, &f, g)?;
        let h = t.solution.average_estimate(&rho)?;
        println!(
            "{g:.2},{h:.6},{:.6},{:.6}",
            bias(m, &rho)?,
            mse_direct(&rho, m)?
        );
    }
    Ok(())
}
