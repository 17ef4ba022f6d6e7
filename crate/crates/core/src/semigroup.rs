//! Enumeration of words with bounded continuant, the counting function
//! `F_A(x)` and denominator tables.
//!
//! All searches are depth-first from the empty word. Appending a digit to a
//! nonempty word strictly increases the continuant, and at a fixed parent the
//! child continuant `a·<D> + <D^->` is increasing in `a`, so a branch is cut
//! as soon as one digit overshoots the bound.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::continuant::{Alphabet, Rational, Word};
use crate::error::{Error, Result};
use crate::precision::{self, Hp};

/// Which word lengths are admitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    /// Even lengths only: words over the paired alphabet, i.e. elements of the semigroup.
    EvenOnly,
    Any,
}

impl Parity {
    #[inline]
    fn admits(self, len: usize) -> bool {
        match self {
            Parity::EvenOnly => len % 2 == 0,
            Parity::Any => true,
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" | "even-only" => Ok(Parity::EvenOnly),
            "any" => Ok(Parity::Any),
            other => Err(Error::Parse(format!("unknown parity {other:?}"))),
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Parity::EvenOnly => "even",
            Parity::Any => "any",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Emit {
    Words,
    Counts,
    Denominators,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationQuery {
    pub alphabet: Alphabet,
    pub bound: BigUint,
    pub parity: Parity,
    pub emit: Emit,
}

impl EnumerationQuery {
    pub fn new(alphabet: Alphabet, bound: impl Into<BigUint>, parity: Parity, emit: Emit) -> Self {
        EnumerationQuery {
            alphabet,
            bound: bound.into(),
            parity,
            emit,
        }
    }

    /// Cache key: alphabet, bound and parity.
    pub fn key(&self) -> String {
        format!("{}|{}|{}", self.alphabet, self.bound, self.parity)
    }
}

/// Output of [`run_query`], shaped by the query's `emit` field.
#[derive(Clone, Debug)]
pub enum QueryOutput {
    Words(Vec<(Word, BigUint)>),
    Count(u128),
    Denominators(DenominatorTable),
}

pub fn run_query(query: &EnumerationQuery) -> Result<QueryOutput> {
    Ok(match query.emit {
        Emit::Words => QueryOutput::Words(enumerate_bounded(query).collect()),
        Emit::Counts => QueryOutput::Count(match query.bound.to_u64() {
            Some(b) if b <= FAST_LIMIT => count_words(&query.alphabet, b).of(query.parity),
            _ => enumerate_bounded(query).count() as u128,
        }),
        Emit::Denominators => QueryOutput::Denominators(denominator_set(query)?),
    })
}

trait Cont: Clone + Ord {
    fn zero() -> Self;
    fn one() -> Self;
    fn child(&self, digit: u32, prev: &Self) -> Self;
    fn to_big(&self) -> BigUint;
}

impl Cont for u128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    #[inline]
    fn child(&self, digit: u32, prev: &Self) -> Self {
        // callers keep every stored value <= u64::MAX, so this cannot overflow
        digit as u128 * *self + *prev
    }
    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }
}

impl Cont for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn child(&self, digit: u32, prev: &Self) -> Self {
        self * digit + prev
    }
    fn to_big(&self) -> BigUint {
        self.clone()
    }
}

struct Frame<C> {
    prev: C,
    cur: C,
    next: usize,
}

struct Dfs<C: Cont> {
    digits: Vec<u32>,
    bound: C,
    parity: Parity,
    word: Vec<u32>,
    stack: Vec<Frame<C>>,
}

impl<C: Cont> Dfs<C> {
    fn new(alphabet: &Alphabet, bound: C, parity: Parity) -> Self {
        let stack = if bound >= C::one() {
            vec![Frame {
                prev: C::zero(),
                cur: C::one(),
                next: 0,
            }]
        } else {
            Vec::new()
        };
        Dfs {
            digits: alphabet.digits().to_vec(),
            bound,
            parity,
            word: Vec::new(),
            stack,
        }
    }

    fn next_word(&mut self) -> Option<(Word, BigUint)> {
        loop {
            let depth = self.stack.len();
            let frame = self.stack.last_mut()?;
            if frame.next >= self.digits.len() {
                self.stack.pop();
                self.word.pop();
                continue;
            }
            let a = self.digits[frame.next];
            frame.next += 1;
            let child = frame.cur.child(a, &frame.prev);
            if child > self.bound {
                // larger digits overshoot too
                frame.next = self.digits.len();
                continue;
            }
            let cur = frame.cur.clone();
            self.word.push(a);
            self.stack.push(Frame {
                prev: cur,
                cur: child.clone(),
                next: 0,
            });
            if self.parity.admits(depth) {
                return Some((Word::from_raw(self.word.clone()), child.to_big()));
            }
        }
    }
}

/// Lazy stream of `(word, continuant)` with `1 <= <word> <= bound`, in
/// depth-first order.
pub struct BoundedWords {
    inner: Inner,
}

enum Inner {
    Small(Dfs<u128>),
    Big(Dfs<BigUint>),
}

impl Iterator for BoundedWords {
    type Item = (Word, BigUint);

    fn next(&mut self) -> Option<Self::Item> {
        match &mut self.inner {
            Inner::Small(d) => d.next_word(),
            Inner::Big(d) => d.next_word(),
        }
    }
}

/// Every word `D` with `|D| >= 1`, `<D> <= bound` and the query's parity,
/// each exactly once. A bound below 1 gives an empty stream.
pub fn enumerate_bounded(query: &EnumerationQuery) -> BoundedWords {
    let inner = match query.bound.to_u64() {
        Some(b) => Inner::Small(Dfs::new(&query.alphabet, b as u128, query.parity)),
        None => Inner::Big(Dfs::new(&query.alphabet, query.bound.clone(), query.parity)),
    };
    BoundedWords { inner }
}

/// Largest bound handled by the `u64` fast paths.
pub const FAST_LIMIT: u64 = 1 << 56;

/// Visits every word with continuant `<= bound` and the given parity.
/// Work is split across threads by two-digit prefix; `fold` builds a
/// per-thread accumulator and `merge` combines them.
pub(crate) fn par_visit<T, F, M>(alphabet: &Alphabet, bound: u64, parity: Parity, init: T, visit: F, merge: M) -> T
where
    T: Clone + Send + Sync,
    F: Fn(&mut T, &[u32], u64) + Sync,
    M: Fn(T, T) -> T + Sync + Send,
{
    assert!(bound <= FAST_LIMIT);
    let digits = alphabet.digits();
    let mut acc = init.clone();
    let mut prefixes = Vec::new();
    for &a in digits {
        if a as u64 > bound {
            break;
        }
        if parity.admits(1) {
            visit(&mut acc, &[a], a as u64);
        }
        for &b in digits {
            let c = a as u64 * b as u64 + 1;
            if c > bound {
                break;
            }
            prefixes.push((a, b, c));
        }
    }
    let rest = prefixes
        .par_iter()
        .fold(
            || init.clone(),
            |mut local, &(a, b, c)| {
                let mut word = vec![a, b];
                if parity.admits(2) {
                    visit(&mut local, &word, c);
                }
                visit_rec(digits, bound, parity, b as u64, c, &mut word, &mut local, &visit);
                local
            },
        )
        .reduce(|| init.clone(), &merge);
    merge(acc, rest)
}

#[allow(clippy::too_many_arguments)]
fn visit_rec<T, F>(digits: &[u32], bound: u64, parity: Parity, prev: u64, cur: u64, word: &mut Vec<u32>, acc: &mut T, visit: &F)
where
    F: Fn(&mut T, &[u32], u64),
{
    for &a in digits {
        let child = a as u64 * cur + prev;
        if child > bound {
            break;
        }
        word.push(a);
        if parity.admits(word.len()) {
            visit(acc, word, child);
        }
        visit_rec(digits, bound, parity, cur, child, word, acc, visit);
        word.pop();
    }
}

/// Word counts split by length parity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityCounts {
    pub even: u128,
    pub odd: u128,
}

impl ParityCounts {
    pub fn of(self, parity: Parity) -> u128 {
        match parity {
            Parity::EvenOnly => self.even,
            Parity::Any => self.even + self.odd,
        }
    }

    fn add(self, o: ParityCounts) -> ParityCounts {
        ParityCounts {
            even: self.even + o.even,
            odd: self.odd + o.odd,
        }
    }
}

/// Counts all words of length `>= 1` with continuant `<= x`.
///
/// Only nodes that have at least one child are expanded; the children of a
/// node are counted in bulk.
pub fn count_words(alphabet: &Alphabet, x: u64) -> ParityCounts {
    assert!(x <= FAST_LIMIT, "count_words bound above the fast-path limit");
    let digits = alphabet.digits();
    let mut top = ParityCounts::default();
    let mut prefixes = Vec::new();
    for &a in digits {
        if a as u64 > x {
            break;
        }
        top.odd += 1;
        for &b in digits {
            let c = a as u64 * b as u64 + 1;
            if c > x {
                break;
            }
            top.even += 1;
            prefixes.push((b as u64, c));
        }
    }
    let rest = prefixes
        .par_iter()
        .map(|&(prev, cur)| {
            let mut acc = ParityCounts::default();
            count_rec(digits, x, prev, cur, true, &mut acc);
            acc
        })
        .reduce(ParityCounts::default, ParityCounts::add);
    top.add(rest)
}

/// Number of alphabet digits `<= limit`.
#[inline]
fn digits_upto(digits: &[u32], limit: u64) -> usize {
    digits.partition_point(|&d| (d as u64) <= limit)
}

fn count_rec(digits: &[u32], x: u64, prev: u64, cur: u64, even: bool, acc: &mut ParityCounts) {
    // children: a*cur + prev <= x
    if x < prev {
        return;
    }
    let n_children = digits_upto(digits, (x - prev) / cur) as u128;
    if even {
        acc.odd += n_children;
    } else {
        acc.even += n_children;
    }
    // a child `a*cur+prev` has its own children iff d0*(a*cur+prev) + cur <= x
    let d0 = digits[0] as u64;
    if x < cur {
        return;
    }
    let lim = (x - cur) / d0;
    if lim < prev {
        return;
    }
    let n_inner = digits_upto(digits, (lim - prev) / cur);
    for &a in &digits[..n_inner] {
        let child = a as u64 * cur + prev;
        count_rec(digits, x, cur, child, !even, acc);
    }
}

/// `F_A(x)`: the number of even-length words with continuant `<= x`.
pub fn count_fa(alphabet: &Alphabet, x: u64) -> u128 {
    if x < 1 {
        return 0;
    }
    count_words(alphabet, x).even
}

/// Membership table of the denominators `d <= N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenominatorTable {
    bound: u64,
    membership: Vec<bool>,
    count: u64,
}

impl DenominatorTable {
    pub fn from_membership(bound: u64, membership: Vec<bool>) -> Result<Self> {
        if membership.len() as u64 != bound + 1 {
            return Err(Error::InvalidInput(format!(
                "membership has {} slots, expected {}",
                membership.len(),
                bound + 1
            )));
        }
        if membership.first() == Some(&true) {
            return Err(Error::InvalidInput("0 cannot be a denominator".into()));
        }
        let count = membership.iter().filter(|&&b| b).count() as u64;
        Ok(DenominatorTable {
            bound,
            membership,
            count,
        })
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn contains(&self, d: u64) -> bool {
        d >= 1 && d <= self.bound && self.membership[d as usize]
    }

    /// Slots `0..=N`; slot 0 is always false.
    pub fn membership(&self) -> &[bool] {
        &self.membership
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        (1..=self.bound).filter(|&d| self.membership[d as usize])
    }

    pub fn missing(&self) -> impl Iterator<Item = u64> + '_ {
        (1..=self.bound).filter(|&d| !self.membership[d as usize])
    }

    pub fn density(&self) -> Rational {
        Rational::new(self.count.into(), self.bound.max(1).into())
    }
}

/// Denominator table of the query's alphabet, bound and parity.
pub fn denominator_set(query: &EnumerationQuery) -> Result<DenominatorTable> {
    let bound = query
        .bound
        .to_u64()
        .filter(|&b| b <= FAST_LIMIT && usize::try_from(b).is_ok())
        .ok_or_else(|| Error::TooLarge(query.bound.to_string()))?;
    if bound == 0 {
        return DenominatorTable::from_membership(0, vec![false]);
    }
    let size = bound as usize + 1;
    let membership = par_visit(
        &query.alphabet,
        bound,
        query.parity,
        Vec::<bool>::new(),
        |acc, _w, c| {
            if acc.is_empty() {
                acc.resize(size, false);
            }
            acc[c as usize] = true;
        },
        |a, b| match (a.is_empty(), b.is_empty()) {
            (true, _) => b,
            (_, true) => a,
            _ => a.into_iter().zip(b).map(|(x, y)| x | y).collect(),
        },
    );
    let membership = if membership.is_empty() {
        vec![false; size]
    } else {
        membership
    };
    DenominatorTable::from_membership(bound, membership)
}

/// `#D_A(N) / N` as an exact rational.
pub fn density(alphabet: &Alphabet, n: u64, parity: Parity) -> Result<Rational> {
    if n < 1 {
        return Err(Error::Precondition("density needs N >= 1".into()));
    }
    let q = EnumerationQuery::new(alphabet.clone(), n, parity, Emit::Denominators);
    Ok(denominator_set(&q)?.density())
}

/// Truth of the three inequalities of the counting window at one `x`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HensleyWindow {
    pub x: u64,
    pub x_inner: u64,
    pub delta: f64,
    pub f_x: u128,
    pub f_inner: u128,
    /// `x^{2δ} / (32 A^4)`
    pub lower_value: f64,
    /// `8 x^{2δ}`
    pub upper_value: f64,
    pub lower_holds: bool,
    pub middle_holds: bool,
    pub upper_holds: bool,
}

impl HensleyWindow {
    pub fn all_hold(&self) -> bool {
        self.lower_holds && self.middle_holds && self.upper_holds
    }
}

/// Checks `x^{2δ}/(32A^4) <= F(x) - F(x/(4A^2)) <= F(x) <= 8 x^{2δ}`.
pub fn verify_hensley_window(alphabet: &Alphabet, x: u64, delta: f64) -> Result<HensleyWindow> {
    let a = alphabet.max_digit() as u64;
    if x < 4 * a * a {
        return Err(Error::Precondition(format!("x = {x} is below 4A^2 = {}", 4 * a * a)));
    }
    if !(delta > 0.5 && delta < 1.0) {
        return Err(Error::Precondition(format!("delta = {delta} is outside (1/2, 1)")));
    }
    let x_inner = x / (4 * a * a);
    let f_x = count_fa(alphabet, x);
    let f_inner = count_fa(alphabet, x_inner);
    let diff = f_x - f_inner;

    let mut hp = Hp::new();
    let xf = hp.int(x as u128);
    let two_delta = hp.float(2.0 * delta);
    let power = hp.pow(&xf, &two_delta);
    let lower = hp.div(&power, &hp.int(32 * (a as u128).pow(4)));
    let upper = hp.mul(&power, &hp.int(8));
    Ok(HensleyWindow {
        x,
        x_inner,
        delta,
        f_x,
        f_inner,
        lower_value: precision::to_f64(&lower),
        upper_value: precision::to_f64(&upper),
        lower_holds: precision::le(&lower, &hp.int(diff)),
        middle_holds: diff <= f_x,
        upper_holds: precision::le(&hp.int(f_x), &upper),
    })
}
