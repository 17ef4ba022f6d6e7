//! Sawtooth sums, V(z), the near-zero pair bound and partial-quotient sums.
//!
//! cargo run --release --example dedekind_sums

use continuant::dedekind::{
    congruence_count_check, ded_bound_check, frozen_constant, knuth_yao_ratio, reduction_remainder, rho, s_alpha,
    sawtooth_sum, v_sum,
};
use continuant::Rational;

fn main() -> continuant::Result<()> {
    let x = Rational::new(1.into(), 8.into());
    println!("sum rho(n/2 + 1/8) = {}, rho(2/8) = {}", sawtooth_sum(1, 2, &x)?, rho(&(x * Rational::from_integer(2.into()))));
    println!("V(1) = {}, V(-1) = {} for P2 = 5, c = 2", v_sum(5, 2, 1)?, v_sum(5, 2, -1)?);
    println!("reduction remainder P2 = 7, c = 3, z = 2: {}", reduction_remainder(7, 3, 2)?);

    let c = frozen_constant();
    for (y1, y2, p, r) in [(1, 1, 10, 20), (1, 4, 500, 50), (3, 7, 1000, 100), (11, 13, 2000, 500)] {
        let row = ded_bound_check(y1, y2, p, &Rational::from_integer(r.into()), &c)?;
        println!("y=({y1},{y2}) P={p} R={r}: count {} <= {:.3} (slack {:.3})", row.lhs, f(&row.rhs), f(&row.slack));
    }

    println!("s(3/7) = {}, s(2/5) = {}", s_alpha(3, 7)?, s_alpha(2, 5)?);
    for b in [5, 100, 1000, 10_000] {
        println!("Knuth-Yao ratio at b = {b}: {:.3}", knuth_yao_ratio(b)?);
    }
    let cc = congruence_count_check(3, 7, 50, 10)?;
    println!("y4 = 3 y3 mod 7 on [1,50]x[1,10]: {} vs {} (ratio {:.3})", cc.count, cc.main_term, cc.error_term_ratio);
    Ok(())
}

fn f(r: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}
