//! Enumerations through the on-disk cache; a second call reads the file.
//!
//! cargo run --release --example enumeration_cache -- /tmp/continuant-cache

use continuant::cache::Cache;
use continuant::semigroup::{Emit, EnumerationQuery, Parity};
use continuant::Alphabet;

fn main() -> continuant::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| std::env::temp_dir().join("continuant-cache").display().to_string());
    let cache = Cache::from_env_or(Some(dir.into()));
    let q = EnumerationQuery::new(Alphabet::range(3)?, 20_000u32, Parity::EvenOnly, Emit::Words);
    for round in 0..2 {
        let t = std::time::Instant::now();
        let words = cache.words(&q)?;
        println!("round {round}: {} words in {:.2?}", words.len(), t.elapsed());
    }
    let t = cache.denominators(&EnumerationQuery::new(Alphabet::range(3)?, 20_000u32, Parity::Any, Emit::Denominators))?;
    println!("{} of 20000 are denominators over 1..3; cache at {}", t.count(), cache.dir().unwrap().display());
    Ok(())
}
