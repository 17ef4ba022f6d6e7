//! Least-squares fit of the growth exponent of F_A(x) and the threshold
//! constants.
//!
//! cargo run --release --example dimension_fit -- 1..7

use continuant::dimension::{dimension_report, hensley_formula, threshold_constants};
use continuant::workbench::default_grid;
use continuant::Alphabet;

fn main() -> continuant::Result<()> {
    let alphabet: Alphabet = std::env::args().nth(1).as_deref().unwrap_or("1..7").parse()?;
    let r = dimension_report(&alphabet, &default_grid())?;
    for (x, f) in &r.grid {
        println!("F({x}) = {f}");
    }
    println!("delta = {:.5} +- {:.1e}", r.delta, r.stderr);
    if alphabet.digits().iter().enumerate().all(|(i, &d)| d as usize == i + 1) {
        println!("large-alphabet approximation: {:.5}", hensley_formula(alphabet.max_digit())?);
    }
    for (name, value) in threshold_constants(50) {
        println!("{name:>22} = {value}");
    }
    println!("above (full coverage, positive proportion, refined): {:?}", r.thresholds.as_tuple());
    Ok(())
}
