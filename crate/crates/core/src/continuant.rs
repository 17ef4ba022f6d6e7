//! Continuants, finite continued fractions and their generator-matrix form.
//!
//! A word `D = (d_1, ..., d_k)` of positive partial quotients has continuant
//! `<D>` given by `<> = 1`, `<d_1> = d_1` and
//! `<d_1..d_k> = <d_1..d_{k-1}> d_k + <d_1..d_{k-2}>`. The continued fraction
//! `[D] = 1/(d_1 + 1/(d_2 + ...))` equals `<D_-> / <D>`, where `D_-` drops the
//! first digit.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational number, always reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

/// A finite alphabet of admissible partial quotients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Alphabet {
    digits: Vec<u32>,
}

impl Alphabet {
    pub fn new(digits: Vec<u32>) -> Result<Self> {
        if digits.len() < 2 {
            return Err(Error::InvalidAlphabet(format!(
                "need at least two digits, got {}",
                digits.len()
            )));
        }
        if digits[0] == 0 {
            return Err(Error::InvalidAlphabet("digits must be positive".into()));
        }
        if digits.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidAlphabet(
                "digits must be strictly increasing".into(),
            ));
        }
        Ok(Alphabet { digits })
    }

    /// The alphabet `{1, 2, ..., a}`.
    pub fn range(a: u32) -> Result<Self> {
        Self::new((1..=a).collect())
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Largest admissible digit.
    pub fn max_digit(&self) -> u32 {
        *self.digits.last().expect("alphabet is nonempty")
    }

    pub fn contains(&self, d: u32) -> bool {
        self.digits.binary_search(&d).is_ok()
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl TryFrom<Vec<u32>> for Alphabet {
    type Error = Error;

    fn try_from(v: Vec<u32>) -> Result<Self> {
        Alphabet::new(v)
    }
}

impl From<Alphabet> for Vec<u32> {
    fn from(a: Alphabet) -> Self {
        a.digits
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let contiguous = self
            .digits
            .iter()
            .enumerate()
            .all(|(i, &d)| d as usize == i + 1);
        if contiguous {
            write!(f, "1..{}", self.max_digit())
        } else {
            let parts: Vec<String> = self.digits.iter().map(u32::to_string).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

/// Accepts `1..7` or a comma list such as `1,2,3,4,5,6,8`.
impl FromStr for Alphabet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((lo, hi)) = s.split_once("..") {
            let lo: u32 = lo
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad alphabet range start in {s:?}")))?;
            let hi: u32 = hi
                .trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| Error::Parse(format!("bad alphabet range end in {s:?}")))?;
            return Alphabet::new((lo..=hi).collect());
        }
        let digits = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad alphabet digit {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Alphabet::new(digits)
    }
}

/// A finite sequence of partial quotients; may be empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(digits: Vec<u32>) -> Result<Self> {
        if let Some(position) = digits.iter().position(|&d| d == 0) {
            return Err(Error::InvalidWord { position, digit: 0 });
        }
        Ok(Word(digits))
    }

    /// Builds a word from signed digits, rejecting anything `<= 0`.
    pub fn from_signed(digits: &[i64]) -> Result<Self> {
        digits
            .iter()
            .enumerate()
            .map(|(position, &d)| {
                if d <= 0 || d > u32::MAX as i64 {
                    Err(Error::InvalidWord { position, digit: d })
                } else {
                    Ok(d as u32)
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// Builds a word and checks every digit against `alphabet`.
    pub fn over(alphabet: &Alphabet, digits: Vec<u32>) -> Result<Self> {
        if let Some(&digit) = digits.iter().find(|&&d| !alphabet.contains(d)) {
            return Err(Error::DigitOutsideAlphabet {
                digit,
                alphabet: alphabet.to_string(),
            });
        }
        Word::new(digits)
    }

    pub(crate) fn from_raw(digits: Vec<u32>) -> Self {
        debug_assert!(digits.iter().all(|&d| d > 0));
        Word(digits)
    }

    pub fn ones(len: usize) -> Self {
        Word(vec![1; len])
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `D_-`: drop the first digit.
    pub fn tail(&self) -> Word {
        Word(self.0.iter().skip(1).copied().collect())
    }

    /// `D^-`: drop the last digit.
    pub fn init(&self) -> Word {
        let n = self.0.len().saturating_sub(1);
        Word(self.0[..n].to_vec())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Parses a comma list of digits. The empty string is the empty word.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if s.is_empty() {
            return Ok(Word::default());
        }
        let digits = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad digit {:?}", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Word::from_signed(&digits)
    }
}

/// A 2x2 integer matrix `[[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn identity() -> Self {
        Mat2 {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    /// The generator `[[0, 1], [1, digit]]`.
    pub fn generator(digit: u32) -> Self {
        Mat2 {
            a: BigInt::zero(),
            b: BigInt::one(),
            c: BigInt::one(),
            d: BigInt::from(digit),
        }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    /// Max-entry norm.
    pub fn norm(&self) -> BigInt {
        [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .map(|x| x.magnitude().clone())
            .max()
            .map(BigInt::from)
            .expect("four entries")
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }
}

impl std::ops::Mul for &Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: &Mat2) -> Mat2 {
        Mat2::mul(self, rhs)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// `<D>` for a digit slice. Runs in `u128` until overflow, then in `BigUint`.
pub(crate) fn continuant_of(digits: &[u32]) -> BigUint {
    let mut prev: u128 = 0;
    let mut cur: u128 = 1;
    for (i, &d) in digits.iter().enumerate() {
        match (d as u128).checked_mul(cur).and_then(|x| x.checked_add(prev)) {
            Some(next) => {
                prev = cur;
                cur = next;
            }
            None => return continuant_big(&digits[i..], BigUint::from(prev), BigUint::from(cur)),
        }
    }
    BigUint::from(cur)
}

fn continuant_big(rest: &[u32], mut prev: BigUint, mut cur: BigUint) -> BigUint {
    for &d in rest {
        let next = &cur * d + &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// `<D>` when it fits in a `u64`.
pub(crate) fn continuant_u64(digits: &[u32]) -> Option<u64> {
    let mut prev: u64 = 0;
    let mut cur: u64 = 1;
    for &d in digits {
        let next = (d as u64).checked_mul(cur)?.checked_add(prev)?;
        prev = cur;
        cur = next;
    }
    Some(cur)
}

/// The continuant `<D>`; `<> = 1`.
pub fn continuant(word: &Word) -> BigUint {
    continuant_of(word.digits())
}

/// `[D] = <D_-> / <D>`, the value of the finite continued fraction.
pub fn cf_value(word: &Word) -> Result<Rational> {
    if word.is_empty() {
        return Err(Error::UndefinedValue);
    }
    let num = continuant_of(&word.digits()[1..]);
    let den = continuant_of(word.digits());
    Ok(Rational::new(BigInt::from(num), BigInt::from(den)))
}

/// Product of the generator matrices of `word`; identity for the empty word.
pub fn word_to_matrix(word: &Word) -> Mat2 {
    let d = word.digits();
    let k = d.len();
    if k == 0 {
        return Mat2::identity();
    }
    // a = <d_2..d_{k-1}>, which for k = 1 is the continuant of the "(-1)-length" word, 0.
    let a = if k == 1 {
        BigInt::zero()
    } else {
        BigInt::from(continuant_of(&d[1..k - 1]))
    };
    Mat2 {
        a,
        b: BigInt::from(continuant_of(&d[1..])),
        c: BigInt::from(continuant_of(&d[..k - 1])),
        d: BigInt::from(continuant_of(d)),
    }
}

/// `←D`, the reversed word.
pub fn mirror(word: &Word) -> Word {
    let mut v = word.0.clone();
    v.reverse();
    Word(v)
}

/// Result of checking the concatenation identity for `<D, B>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcatCheck {
    pub value: BigUint,
    /// `<D,B> - <D><B>(1 + [←D][B])`, exactly zero when the identity holds.
    pub identity_residual: Rational,
    /// `<D><B> <= <D,B> <= 2<D><B>`.
    pub within_bounds: bool,
}

pub fn concat_continuant(d: &Word, b: &Word) -> Result<ConcatCheck> {
    if d.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput(
            "concatenation identity needs two nonempty words".into(),
        ));
    }
    let value = continuant(&d.concat(b));
    let cd = continuant(d);
    let cb = continuant(b);
    let prod = Rational::from_integer(BigInt::from(&cd * &cb));
    let factor = Rational::one() + cf_value(&mirror(d))? * cf_value(b)?;
    let identity_residual = Rational::from_integer(BigInt::from(value.clone())) - prod * factor;
    let lower = &cd * &cb;
    let within_bounds = lower <= value && value <= &lower * 2u32;
    Ok(ConcatCheck {
        value,
        identity_residual,
        within_bounds,
    })
}

/// Fibonacci number `F_n` with `F_0 = 0`, `F_1 = 1`.
pub fn fibonacci(n: usize) -> BigUint {
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    for _ in 0..n {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}
