//! Larger optical superpositions: the equal-weight state over N photon
//! numbers, plus a custom weighting.

use optomech_mmse::{find_tstar, ModelConfig, OpticalAmplitudes, TimeWindow};

fn main() -> optomech_mmse::Result<()> {
    println!("state,tau_star,cbar_over_sigma2,estimates");
    let report = |label: &str, a: OpticalAmplitudes| -> optomech_mmse::Result<()> {
        let cfg = ModelConfig {
            n_phot: a.len(),
            ..ModelConfig::default()
        };
        let t = find_tstar(&cfg, &a, TimeWindow::first_period(), 4096)?;
        let est: Vec<String> = t
            .solution
            .eigenvalues
            .iter()
            .map(|v| format!("{v:.4}"))
            .collect();
        println!(
            "{label},{:.6},{:.6},{}",
            t.tau_star,
            t.cbar_at_star / (cfg.sigma * cfg.sigma),
            est.join(" ")
        );
        Ok(())
    };
    for n in 2..=5 {
        report(&format!("uniform N={n}"), OpticalAmplitudes::uniform(n))?;
    }
    report(
        "weighted 1:2:1",
        OpticalAmplitudes::from_real(&[0.5, 0.5f64.sqrt(), 0.5])?,
    )?;
    Ok(())
}
