//! Samples |S(a/q + K/N)|^2 in each of the nine (q, K) domains for the toy
//! ensemble over {1,2}.
//!
//! cargo run --release --example nine_domains -- 42

use continuant::dimension::estimate_delta;
use continuant::ensemble::{build_omega, ConstantsMode};
use continuant::expsum::{nine_domain_report, DomainGeometry, NineDomainConfig, Spectrum};
use continuant::workbench::default_grid;
use continuant::Alphabet;

fn main() -> continuant::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let alphabet = Alphabet::range(2)?;
    let (n, eps0) = (1_000_000_000u64, 0.5);
    let mode = ConstantsMode::relaxed().with_override("J", 1.0)?.with_override("p", 2.0)?;
    let spec = Spectrum::from_ensemble(&build_omega(n as f64, eps0, &alphabet, &mode)?)?;

    let delta = estimate_delta(&alphabet, &default_grid())?.delta;
    let geo = DomainGeometry::new(n as f64, delta, eps0, 1.0)?;
    println!("delta {delta:.4}, xi1 = {:.2}, Q_C = {:.2}", geo.xi1(), geo.q_c());
    let rep = nine_domain_report(&spec, &NineDomainConfig { n, delta, eps0, q0: 1.0, seed, samples_per_domain: 32 })?;
    println!("{} products, support {}, R = {:.1}", rep.total, rep.support, rep.r);
    for (d, s) in &rep.domains {
        println!("domain {d}: {:>3} points, mean {:.2e}, max {:.2e}", s.points, s.mean_normalized, s.max_normalized);
    }
    println!("unassigned share of the outer region: {:.3}", rep.unassigned_fraction);
    Ok(())
}
