//! Norm spectrum of the toy ensemble, S(theta) on a few points and the
//! Parseval density bound.
//!
//! cargo run --release --example exponential_sum

use continuant::ensemble::{build_omega, ConstantsMode};
use continuant::expsum::{density_lower_bound, equidistribution_ratio, eval_s, parseval, parseval_quadrature, Spectrum};
use continuant::Alphabet;

fn main() -> continuant::Result<()> {
    let mode = ConstantsMode::relaxed().with_override("J", 1.0)?.with_override("p", 2.0)?;
    let om = build_omega(1e9, 0.5, &Alphabet::range(2)?, &mode)?;
    let spec = Spectrum::from_ensemble(&om)?;
    println!("total {}, support {}, largest norm {}", spec.total(), spec.support(), spec.max_norm());
    println!("parseval {} (quadrature on 2^14 nodes: {:.3})", parseval(&spec), parseval_quadrature(&spec, 1 << 14));
    println!("support >= {}", density_lower_bound(&spec)?);
    println!("R = N * parseval / total^2 = {}", equidistribution_ratio(&spec, 1_000_000_000)?);
    for theta in [0.0, 0.5, 1.0 / 3.0, 0.618_033_988_749_895] {
        let s = eval_s(theta, &spec);
        println!("|S({theta:.6})| = {:.3}", s.norm());
    }
    Ok(())
}
