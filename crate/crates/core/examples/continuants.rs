//! Continuants, continued-fraction values and the concatenation identity.
//!
//! cargo run --example continuants -- 2,1,3 4,4

use continuant::continuant::{cf_value, concat_continuant, continuant, fibonacci, mirror, word_to_matrix};
use continuant::Word;

fn main() -> continuant::Result<()> {
    let mut args = std::env::args().skip(1);
    let d: Word = args.next().as_deref().unwrap_or("2,1,3").parse()?;
    let b: Word = args.next().as_deref().unwrap_or("4,4").parse()?;

    for w in [&d, &b] {
        println!("<{w}> = {}   [{w}] = {}   matrix {}", continuant(w), cf_value(w)?, word_to_matrix(w));
        println!("  mirrored <{}> = {}", mirror(w), continuant(&mirror(w)));
    }
    let c = concat_continuant(&d, &b)?;
    println!("<{}> = {}  residual {}  within [<D><B>, 2<D><B>]: {}", d.concat(&b), c.value, c.identity_residual, c.within_bounds);

    for r in [0, 1, 10, 40] {
        println!("<1^{r}> = {} = F_{}", continuant(&Word::ones(r)), r + 1);
        assert_eq!(continuant(&Word::ones(r)), fibonacci(r + 1));
    }
    Ok(())
}
