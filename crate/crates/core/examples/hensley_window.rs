//! Two-sided bounds on F_A(x) - F_A(x/4A^2) for a given dimension.
//!
//! cargo run --release --example hensley_window

use continuant::dimension::{estimate_delta, DELTA_1_TO_7};
use continuant::semigroup::verify_hensley_window;
use continuant::workbench::default_grid;
use continuant::Alphabet;

fn main() -> continuant::Result<()> {
    for a in 2..=7 {
        let alphabet = Alphabet::range(a)?;
        let delta = if a == 7 { DELTA_1_TO_7 } else { estimate_delta(&alphabet, &default_grid())?.delta };
        for x in [1_000, 10_000, 100_000] {
            let w = verify_hensley_window(&alphabet, x, delta)?;
            println!(
                "A={a} x={x:>6}  {:>10.1} <= {:>8} <= {:>8} <= {:>12.1}  {}",
                w.lower_value,
                w.f_x - w.f_inner,
                w.f_x,
                w.upper_value,
                if w.all_hold() { "ok" } else { "FAIL" }
            );
        }
    }
    Ok(())
}
