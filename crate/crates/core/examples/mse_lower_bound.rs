//! Information-type lower bound on the mean-square error of the optimal
//! measurement, compared with the actual error.

use optomech_mmse::linalg::c;
use optomech_mmse::{
    evaluate_bound, find_tstar, Error, MechInit, ModelConfig, OpticalAmplitudes, TimeWindow,
};

fn main() -> optomech_mmse::Result<()> {
    let cfg = ModelConfig {
        mech: MechInit::coherent(c(0.0, 0.0)),
        ..ModelConfig::default()
    };
    let a = OpticalAmplitudes::uniform(2);
    let t = find_tstar(&cfg, &a, TimeWindow::first_period(), 4096)?;
    let f = cfg.with_tau(t.tau_star).f_coeffs()?;
    println!("g,lower_bound,mse,gap");
    for i in 0..=20 {
        let g = 0.1 * i as f64;
        match evaluate_bound(&f, &a, &t.solution.m_min, g) {
            Ok(b) => println!(
                "{g:.1},{:.6},{:.6},{:.6}",
                b.lower_bound,
                b.mse,
                b.mse - b.lower_bound
            ),
            Err(Error::DegenerateDerivative { .. }) => println!("{g:.1},,,"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
