//! High-precision helpers: binary floats via `astro-float`, plus exact
//! integer routines for radicals and the golden ratio.

use astro_float::{BigFloat, Consts, RoundingMode};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::continuant::Rational;

/// Working precision in bits (about 115 significant decimal digits).
pub const PRECISION_BITS: usize = 384;

const RM: RoundingMode = RoundingMode::ToEven;

/// A small context bundling the constants cache.
pub struct Hp {
    cc: Consts,
}

impl Default for Hp {
    fn default() -> Self {
        Self::new()
    }
}

impl Hp {
    pub fn new() -> Self {
        Hp {
            cc: Consts::new().expect("constants cache"),
        }
    }

    pub fn int(&self, v: u128) -> BigFloat {
        BigFloat::from_u128(v, PRECISION_BITS)
    }

    pub fn big(&mut self, v: &BigUint) -> BigFloat {
        BigFloat::parse(&v.to_string(), astro_float::Radix::Dec, PRECISION_BITS, RM, &mut self.cc)
    }

    /// Exact conversion of an `f64`.
    pub fn float(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, PRECISION_BITS)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(PRECISION_BITS, RM)
    }

    pub fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(PRECISION_BITS, RM, &mut self.cc)
    }

    pub fn exp(&mut self, x: &BigFloat) -> BigFloat {
        x.exp(PRECISION_BITS, RM, &mut self.cc)
    }

    /// `x^e` for positive `x`.
    pub fn pow(&mut self, x: &BigFloat, e: &BigFloat) -> BigFloat {
        let l = self.ln(x);
        let t = l.mul(e, PRECISION_BITS, RM);
        self.exp(&t)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, PRECISION_BITS, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, PRECISION_BITS, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, PRECISION_BITS, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, PRECISION_BITS, RM)
    }
}

/// Nearest `f64` to a big float (through its decimal rendering).
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    x.to_string().parse().unwrap_or(f64::NAN)
}

/// `a < b` for big floats; NaN compares false.
pub fn lt(a: &BigFloat, b: &BigFloat) -> bool {
    matches!(a.cmp(b), Some(c) if c < 0)
}

pub fn le(a: &BigFloat, b: &BigFloat) -> bool {
    matches!(a.cmp(b), Some(c) if c <= 0)
}

/// Renders `num / den` with `digits` digits after the point, truncated.
pub fn rational_decimal(value: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let neg = value.is_negative();
    let scaled = (value.abs() * Rational::from_integer(scale.clone())).to_integer();
    let int_part = &scaled / &scale;
    let frac_part = &scaled % &scale;
    format!(
        "{}{}.{:0>width$}",
        if neg { "-" } else { "" },
        int_part,
        frac_part,
        width = digits
    )
}

/// Lower and upper rational brackets of `sqrt(n)` with width `10^-digits`.
pub fn sqrt_bracket(n: u64, digits: u32) -> (Rational, Rational) {
    let scale = BigUint::from(10u32).pow(digits);
    let root = (BigUint::from(n) * &scale * &scale).sqrt();
    let den = BigInt::from(scale);
    let lo = Rational::new(BigInt::from(root.clone()), den.clone());
    let hi = Rational::new(BigInt::from(root + 1u32), den);
    (lo, hi)
}

/// Rational bracket `[lo, hi]` of `1/φ = (√5 - 1)/2`, width below `10^-digits`.
pub fn inv_golden_bracket(digits: u32) -> (Rational, Rational) {
    let (lo, hi) = sqrt_bracket(5, digits);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    ((lo - Rational::one()) * &half, (hi - Rational::one()) * half)
}

/// Nearest `f64` to a rational, through a 40-digit decimal rendering.
pub fn rational_to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 1e300 && d < 1e300 && d > 1e-300 {
            return rational_decimal(x, 40).parse().unwrap_or(n / d);
        }
    }
    rational_decimal(x, 40).parse().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}
