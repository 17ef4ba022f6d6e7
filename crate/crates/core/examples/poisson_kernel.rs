//! Poisson summation for the smoothing kernel S2(n/H) against its transform.
//!
//! cargo run --release --example poisson_kernel

use continuant::expsum::{kernel_s2, poisson_check};

fn main() -> continuant::Result<()> {
    for h in [2.0, 4.0, 10.0] {
        for z in [0.0, 1.0 / 3.0, 0.5] {
            let r = poisson_check(h, z, 100_000)?;
            println!(
                "H={h:>4} z={z:.3}  lhs {:.10}  rhs {:.10}  residual {:.2e} <= {:.2e}  with tail {:.1e}",
                r.lhs, r.rhs, r.residual, r.tail_bound, r.corrected_residual
            );
        }
    }
    let min = (-1000..=1000).map(|i| kernel_s2(i as f64 / 1000.0)).fold(f64::INFINITY, f64::min);
    println!("min S2 on [-1, 1]: {min:.6}");
    Ok(())
}
