//! The literal parameter schedule at astronomically large N, in log space.
//!
//! cargo run --example schedule_dry_run -- 1e15

use continuant::dimension::DELTA_1_TO_7;
use continuant::ensemble::{ConstantsMode, Schedule};

fn main() -> continuant::Result<()> {
    let ln_n: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1e15);
    let s = Schedule::from_ln(ln_n, 1.0 / 3000.0, &ConstantsMode::literal(DELTA_1_TO_7), Some(7))?;
    println!("ln N = {ln_n:e}: J = {}, {} layers", s.j, s.layers());
    for m in [-s.j - 1, -s.j, 0, 1, s.j + 1] {
        println!("ln N_{m} = {:.6e}", s.ln_at(m));
    }
    let c = s.verify();
    println!("identities: worst relative error {:.1e}, monotone {}", c.max_error(), c.monotone_ok);
    Ok(())
}
