//! Dirichlet decomposition theta = a/q + K/N.
//!
//! cargo run --example dirichlet_arcs -- 0.3183098861837907 1000000

use continuant::expsum::dirichlet_decompose;

fn main() -> continuant::Result<()> {
    let mut args = std::env::args().skip(1);
    let theta: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(std::f64::consts::FRAC_1_PI);
    let n: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    for n in [100, 10_000, n] {
        let p = dirichlet_decompose(theta, n)?;
        println!("N = {n:>8}: theta = {}/{} + {:.4}/N  (valid: {})", p.a, p.q, p.k, p.is_valid());
    }
    Ok(())
}
