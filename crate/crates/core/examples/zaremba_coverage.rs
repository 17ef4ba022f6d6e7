//! Which integers up to N are denominators of fractions with partial
//! quotients in the alphabet.
//!
//! cargo run --release --example zaremba_coverage -- 1..4 20000

use continuant::semigroup::{denominator_set, density, Emit, EnumerationQuery, Parity};
use continuant::Alphabet;

fn main() -> continuant::Result<()> {
    let mut args = std::env::args().skip(1);
    let alphabet: Alphabet = args.next().as_deref().unwrap_or("1..5").parse()?;
    let n: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(20_000);

    let q = EnumerationQuery::new(alphabet.clone(), n, Parity::Any, Emit::Denominators);
    let table = denominator_set(&q)?;
    println!("alphabet {alphabet}: {}/{n} denominators", table.count());
    let missing: Vec<u64> = table.missing().take(20).collect();
    if !missing.is_empty() {
        println!("first gaps: {missing:?}");
    }
    println!("even-length density: {}", density(&alphabet, n, Parity::EvenOnly)?);
    Ok(())
}
