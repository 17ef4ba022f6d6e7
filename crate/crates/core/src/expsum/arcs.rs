use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::continuant::Rational;
use crate::error::{Error, Result};

/// `θ = a/q + K/N` with `q <= √N` and `|K| <= √N/q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcPoint {
    pub a: u64,
    pub q: u64,
    pub k: f64,
    pub n: u64,
}

impl ArcPoint {
    /// `K̄ = max(1, |K|)`
    pub fn k_bar(&self) -> f64 {
        self.k.abs().max(1.0)
    }

    pub fn theta(&self) -> f64 {
        self.a as f64 / self.q as f64 + self.k / self.n as f64
    }

    /// Checks `(a,q) = 1`, `0 <= a <= q <= √N`, `|K| <= √N/q` and that
    /// `a ∈ {0, q}` only for `q = 1`.
    pub fn is_valid(&self) -> bool {
        let sqrt_n = (self.n as f64).sqrt();
        self.q >= 1
            && self.a <= self.q
            && self.a.gcd(&self.q) == 1
            && (self.q as f64) <= sqrt_n * (1.0 + 1e-15)
            && self.k.abs() <= sqrt_n / self.q as f64 * (1.0 + 1e-12)
            && ((self.a != 0 && self.a != self.q) || self.q == 1)
    }
}

/// Dirichlet approximation of `θ ∈ [0, 1]` at level `N`: the convergent
/// `a/q` of smallest denominator with `|θ - a/q| <= 1/(q√N)`.
///
/// `θ` is taken as the exact binary rational it represents, so the
/// comparison is exact.
pub fn dirichlet_decompose(theta: f64, n: u64) -> Result<ArcPoint> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Precondition(format!("theta = {theta} is outside [0, 1]")));
    }
    if n < 1 {
        return Err(Error::Precondition("N must be at least 1".into()));
    }
    let x = Rational::from_float(theta).expect("finite theta");
    let nb = BigInt::from(n);
    // convergents p_i/q_i via the continued fraction of x
    let (mut p0, mut q0) = (BigInt::from(1), BigInt::zero());
    let (mut p1, mut q1) = (x.floor().to_integer(), BigInt::from(1));
    let mut rest = &x - x.floor();
    loop {
        // |x - p/q| <= 1/(q√N)  ⟺  (q x - p)² N <= 1
        let err = &x * Rational::from_integer(q1.clone()) - Rational::from_integer(p1.clone());
        if &err * &err * Rational::from_integer(nb.clone()) <= Rational::from_integer(1.into()) {
            let k = (&x - Rational::new(p1.clone(), q1.clone())) * Rational::from_integer(nb.clone());
            return Ok(ArcPoint {
                a: p1.to_u64().expect("0 <= a <= q"),
                q: q1.to_u64().expect("q <= sqrt N"),
                k: k.to_f64().unwrap_or(0.0),
                n,
            });
        }
        if rest.is_zero() {
            unreachable!("an exact convergent always passes");
        }
        let inv = rest.recip();
        let digit = inv.floor().to_integer();
        rest = &inv - inv.floor();
        let p2 = &digit * &p1 + &p0;
        let q2 = &digit * &q1 + &q0;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        debug_assert!(!q1.is_negative());
    }
}
