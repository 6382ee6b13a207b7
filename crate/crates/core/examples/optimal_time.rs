//! Locates the interaction time that minimises the average cost, then shows
//! the optimal measurement found there.

use optomech_mmse::{find_tstar, ModelConfig, OpticalAmplitudes, TimeWindow};

fn main() -> optomech_mmse::Result<()> {
    let cfg = ModelConfig::default();
    let a = OpticalAmplitudes::uniform(2);
    let t = find_tstar(&cfg, &a, TimeWindow::first_period(), 4096)?;
    let var = cfg.sigma * cfg.sigma;
    println!("tau*            = {:.10}", t.tau_star);
    println!(
        "cost at tau*    = {:.10} ({:.4} of the prior variance)",
        t.cbar_at_star,
        t.cbar_at_star / var
    );
    println!("on window edge  = {}", t.at_edge);
    println!("possible values = {:?}", t.solution.eigenvalues);
    println!("lyapunov resid  = {:.2e}", t.solution.residual());
    println!("optimal operator:{}", t.solution.m_min);
    Ok(())
}
