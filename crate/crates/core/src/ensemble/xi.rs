use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::ConstantsMode;
use crate::continuant::{fibonacci, Alphabet, Rational, Word};
use crate::error::{Error, Result};
use crate::precision;
use crate::semigroup::FAST_LIMIT;

/// `[[a, b], [c, d]]` with nonnegative entries, row-major.
pub(crate) type M2 = [u128; 4];

pub(crate) const IDENTITY: M2 = [1, 0, 0, 1];

pub(crate) fn mat_mul(x: &M2, y: &M2) -> Option<M2> {
    let e = |p: u128, q: u128, r: u128, s: u128| p.checked_mul(q)?.checked_add(r.checked_mul(s)?);
    Some([
        e(x[0], y[0], x[1], y[2])?,
        e(x[0], y[1], x[1], y[3])?,
        e(x[2], y[0], x[3], y[2])?,
        e(x[2], y[1], x[3], y[3])?,
    ])
}

pub(crate) fn word_matrix(digits: &[u32]) -> M2 {
    digits
        .iter()
        .fold(IDENTITY, |m, &d| mat_mul(&m, &[0, 1, 1, d as u128]).expect("member matrix overflow"))
}

/// A pre-ensemble `Ξ(M)` together with the numbers produced while building it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreEnsemble {
    pub m: f64,
    /// Upper end of the chosen norm shell.
    pub l: u64,
    pub p: u32,
    /// Common word length.
    pub k: usize,
    pub window_divisor: f64,
    /// Sizes after steps 1, 2 and 3.
    pub step_sizes: [usize; 3],
    /// Count required of the shell in step 3.
    pub shell_threshold: f64,
    pub members: Vec<Word>,
    #[serde(skip)]
    pub(crate) matrices: Vec<M2>,
}

impl PreEnsemble {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `⟨D⟩` of each member, in member order.
    pub fn norms(&self) -> impl Iterator<Item = u64> + '_ {
        self.matrices.iter().map(|m| m[3] as u64)
    }

    pub fn matrix(&self, i: usize) -> [u128; 4] {
        self.matrices[i]
    }

    /// Lower end `L(1 - 1/log L)` of the shell.
    pub fn shell_floor(&self) -> f64 {
        shell_floor(self.l as f64)
    }

    /// Builds a pre-ensemble from given words, e.g. a deserialized layer.
    pub fn from_members(m: f64, l: u64, p: u32, window_divisor: f64, members: Vec<Word>) -> Result<Self> {
        let k = members.first().map_or(0, Word::len);
        if members.iter().any(|w| w.len() != k) {
            return Err(Error::InvalidInput("members have different lengths".into()));
        }
        let matrices = members.iter().map(|w| word_matrix(w.digits())).collect();
        let n = members.len();
        Ok(PreEnsemble {
            m,
            l,
            p,
            k,
            window_divisor,
            step_sizes: [n; 3],
            shell_threshold: 0.0,
            members,
            matrices,
        })
    }
}

fn shell_floor(l: f64) -> f64 {
    l * (1.0 - 1.0 / l.ln())
}

/// Smallest `p >= 1` with `F_{p-1} <= sqrt(log M) <= F_p`.
pub fn fibonacci_index(m: f64) -> Result<u32> {
    if !(m > 1.0) {
        return Err(Error::UndefinedLog(m));
    }
    let s = m.ln().sqrt();
    let (mut prev, mut cur) = (0f64, 1f64);
    let mut p = 1;
    loop {
        if prev <= s && s <= cur {
            return Ok(p);
        }
        (prev, cur) = (cur, prev + cur);
        p += 1;
    }
}

/// Words starting with `1^p`, continuant in `[lo, hi]`, even length `>= p`,
/// ending with `p` ones.
fn padded_words(alphabet: &Alphabet, p: u32, lo: u64, hi: u64) -> Vec<(Vec<u32>, u64)> {
    struct Ctx<'a> {
        digits: &'a [u32],
        p: usize,
        lo: u64,
        hi: u64,
        out: Vec<(Vec<u32>, u64)>,
    }
    fn emit(ctx: &mut Ctx, word: &[u32], trailing_ones: usize, cont: u64) {
        if word.len() % 2 == 0 && !word.is_empty() && trailing_ones >= ctx.p && cont >= ctx.lo {
            ctx.out.push((word.to_vec(), cont));
        }
    }
    fn rec(ctx: &mut Ctx, word: &mut Vec<u32>, trailing_ones: usize, prev: u64, cur: u64) {
        for i in 0..ctx.digits.len() {
            let a = ctx.digits[i];
            let child = a as u64 * cur + prev;
            if child > ctx.hi {
                break;
            }
            let t = if a == 1 { trailing_ones + 1 } else { 0 };
            word.push(a);
            emit(ctx, word, t, child);
            rec(ctx, word, t, cur, child);
            word.pop();
        }
    }

    let p_us = p as usize;
    let mut ctx = Ctx {
        digits: alphabet.digits(),
        p: p_us,
        lo,
        hi,
        out: Vec::new(),
    };
    if p > 0 && !alphabet.contains(1) {
        return ctx.out;
    }
    // the prefix 1^p has continuant F_{p+1}, its parent F_p
    let (prev, cur) = (fib_u64(p), fib_u64(p + 1));
    if cur > hi {
        return ctx.out;
    }
    let mut word = vec![1; p_us];
    emit(&mut ctx, &word, p_us, cur);
    rec(&mut ctx, &mut word, p_us, prev, cur);
    ctx.out
}

fn fib_u64(n: u32) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a.saturating_add(b));
    }
    a
}

/// Runs the four filtering steps on the even-length words over `alphabet`.
pub fn build_xi(m: f64, alphabet: &Alphabet, mode: &ConstantsMode) -> Result<PreEnsemble> {
    let a = alphabet.max_digit();
    let af = a as f64;
    if !(m > std::f64::consts::E) {
        return Err(Error::Precondition(format!("M = {m} must exceed e")));
    }
    if mode.is_literal() {
        let need = 512.0 * af.powi(3) * m.ln().powi(3);
        if m < need {
            return Err(Error::Precondition(format!("M = {m} is below 2^9 A^3 log^3 M = {need:.3e}")));
        }
    }
    if m.floor() > FAST_LIMIT as f64 {
        return Err(Error::TooLarge(format!("M = {m:.3e} is beyond exhaustive enumeration")));
    }
    let hi = m.floor() as u64;
    let w = mode.window_divisor(a);
    let floor_s1 = m / w;
    let lo = floor_s1.ceil().max(1.0) as u64;

    let p = match mode.get("p") {
        Some(v) => v as u32,
        None => fibonacci_index(m)?,
    };

    // Steps 1 and 2: the window and the ones padding
    let mut s2 = padded_words(alphabet, p, lo, hi);
    let s1_size = if p == 0 {
        s2.len()
    } else {
        crate::semigroup::count_fa(alphabet, hi) as usize - crate::semigroup::count_fa(alphabet, lo - 1) as usize
    };
    if s2.is_empty() {
        return Err(Error::Infeasible {
            step: "S2",
            detail: format!("no even word with {p} leading and trailing ones has continuant in [{lo}, {hi}]"),
        });
    }
    s2.sort_by_key(|e| e.1);
    let norms: Vec<u64> = s2.iter().map(|e| e.1).collect();

    // Step 3: largest L whose log-scaled shell is heavy enough
    let shell_count = |l: u64| -> usize {
        let bottom = floor_s1.max(shell_floor(l as f64));
        let upper = norms.partition_point(|&n| n <= l);
        let lower = norms.partition_point(|&n| (n as f64) < bottom);
        upper.saturating_sub(lower)
    };
    let threshold: f64;
    let heavy: Box<dyn Fn(u64, usize) -> bool> = if mode.is_literal() {
        let delta = mode
            .trusted_delta
            .ok_or_else(|| Error::Precondition("literal mode needs a trusted delta".into()))?;
        threshold = f64::NAN;
        Box::new(move |l: u64, c: usize| {
            let lf = l as f64;
            c as f64 >= lf.powf(2.0 * delta) / (65536.0 * af.powi(5) * lf.ln().powi(3))
        })
    } else {
        // pigeonhole over the t bins M(1-1/log M)^j
        let q = 1.0 - 1.0 / m.ln();
        let mut t = ((1.0 / w).ln() / q.ln()).ceil().max(1.0) as u64;
        while t > 1 && q.powi(t as i32 - 1) <= 1.0 / w {
            t -= 1;
        }
        while q.powi(t as i32) > 1.0 / w {
            t += 1;
        }
        let need = s2.len();
        threshold = need as f64 / t as f64;
        Box::new(move |_l: u64, c: usize| c as u128 * t as u128 >= need as u128)
    };

    // the count only drops when the shell floor passes a norm, so the
    // largest qualifying L is either floor(M) or the last L before a drop
    let mut candidates = vec![hi];
    for &n in &norms {
        if let Some(l) = last_l_with_floor_at_most(n, lo, hi) {
            candidates.push(l);
        }
    }
    candidates.sort_unstable();
    candidates.dedup();
    let l = candidates
        .iter()
        .rev()
        .copied()
        .find(|&l| heavy(l, shell_count(l)))
        .ok_or_else(|| Error::Infeasible {
            step: "S3",
            detail: format!("no shell in [{lo}, {hi}] reaches the required count"),
        })?;
    let bottom = floor_s1.max(shell_floor(l as f64));
    let s3: Vec<(Vec<u32>, u64)> = s2.into_iter().filter(|e| e.1 <= l && e.1 as f64 >= bottom).collect();
    let s3_size = s3.len();

    // Step 4: the most common length, ties toward the shorter
    let mut by_len = std::collections::BTreeMap::<usize, usize>::new();
    for e in &s3 {
        *by_len.entry(e.0.len()).or_default() += 1;
    }
    let (&k, _) = by_len
        .iter()
        .max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(x.0)))
        .expect("S3 is nonempty");
    let mut members: Vec<Vec<u32>> = s3.into_iter().filter(|e| e.0.len() == k).map(|e| e.0).collect();
    members.sort();

    if mode.is_literal() {
        let delta = mode.trusted_delta.unwrap_or(1.0);
        let lf = l as f64;
        let need = lf.powf(2.0 * delta) / (262144.0 * af.powi(5) * lf.ln().powi(4));
        if (members.len() as f64) < need {
            return Err(Error::Check(format!("|Xi| = {} is below {need:.3}", members.len())));
        }
    }

    let matrices = members.iter().map(|w| word_matrix(w)).collect();
    Ok(PreEnsemble {
        m,
        l,
        p,
        k,
        window_divisor: w,
        step_sizes: [s1_size, norms.len(), s3_size],
        shell_threshold: threshold,
        members: members.into_iter().map(Word::from_raw).collect(),
        matrices,
    })
}

/// Largest integer `L` in `[lo, hi]` with `L(1 - 1/log L) <= n`.
fn last_l_with_floor_at_most(n: u64, lo: u64, hi: u64) -> Option<u64> {
    let ok = |l: u64| l < 3 || shell_floor(l as f64) <= n as f64;
    let lo = lo.max(1);
    if lo > hi || !ok(lo) {
        return None;
    }
    let (mut a, mut b) = (lo, hi);
    if ok(b) {
        return Some(b);
    }
    // invariant: ok(a), !ok(b)
    while b - a > 1 {
        let mid = a + (b - a) / 2;
        if ok(mid) {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(a)
}

/// Largest distances of `b/d` and `c/d` from `1/φ` over a pre-ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenReport {
    pub p: u32,
    /// Upper bounds on `max |b/d - 1/φ|` and `max |c/d - 1/φ|`.
    pub max_dev_b: f64,
    pub max_dev_c: f64,
    /// `1/F_p² + |1/φ - F_p/F_{p+1}|`, the distance to the `p`-th convergent plus its error.
    pub mechanism_bound: f64,
    pub within_mechanism: bool,
    /// `2/log L`, checked in literal mode only.
    pub log_bound: Option<f64>,
    pub within_log_bound: Option<bool>,
    pub skipped: bool,
}

/// Compares each member's `[D]` and `[←D]` with `1/φ`, exactly.
///
/// `1/φ` is bracketed by rationals 60 digits wide; deviations are rounded up
/// and the mechanism bound down before comparing.
pub fn golden_ratio_check(xi: &PreEnsemble, mode: &ConstantsMode) -> Result<GoldenReport> {
    if xi.is_empty() {
        return Err(Error::Precondition("empty pre-ensemble".into()));
    }
    if xi.p == 0 {
        log::warn!("p = 0: no ones padding, golden ratio check skipped");
        return Ok(GoldenReport {
            p: 0,
            max_dev_b: f64::NAN,
            max_dev_c: f64::NAN,
            mechanism_bound: f64::NAN,
            within_mechanism: true,
            log_bound: None,
            within_log_bound: None,
            skipped: true,
        });
    }
    let (lo, hi) = precision::inv_golden_bracket(60);
    let dev_up = |x: &Rational| -> Rational {
        let u = (x - &lo).abs();
        let v = (x - &hi).abs();
        if u > v {
            u
        } else {
            v
        }
    };
    let fp = BigInt::from(fibonacci(xi.p as usize));
    let fp1 = BigInt::from(fibonacci(xi.p as usize + 1));
    let conv = Rational::new(fp.clone(), fp1);
    let to_conv_low = {
        let u = (&lo - &conv).abs();
        let v = (&hi - &conv).abs();
        if lo <= conv && conv <= hi {
            Rational::zero()
        } else if u < v {
            u
        } else {
            v
        }
    };
    let mechanism = Rational::new(1.into(), &fp * &fp) + to_conv_low;

    let mut max_b = Rational::zero();
    let mut max_c = Rational::zero();
    for m in &xi.matrices {
        let d = BigInt::from(m[3]);
        let db = dev_up(&Rational::new(BigInt::from(m[1]), d.clone()));
        let dc = dev_up(&Rational::new(BigInt::from(m[2]), d));
        if db > max_b {
            max_b = db;
        }
        if dc > max_c {
            max_c = dc;
        }
    }
    let within_mechanism = max_b <= mechanism && max_c <= mechanism;
    let f = |r: &Rational| precision::rational_to_f64(r);
    let (log_bound, within_log_bound) = if mode.is_literal() {
        let b = 2.0 / (xi.l as f64).ln();
        (Some(b), Some(f(&max_b) <= b && f(&max_c) <= b))
    } else {
        (None, None)
    };
    Ok(GoldenReport {
        p: xi.p,
        max_dev_b: f(&max_b),
        max_dev_c: f(&max_c),
        mechanism_bound: f(&mechanism),
        within_mechanism,
        log_bound,
        within_log_bound,
        skipped: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuant::continuant;
    use crate::semigroup::{enumerate_bounded, Emit, EnumerationQuery, Parity};
    use num_traits::ToPrimitive;

    fn ab12() -> Alphabet {
        Alphabet::range(2).unwrap()
    }

    #[test]
    fn fibonacci_index_examples() {
        assert_eq!(fibonacci_index(4f64.exp()).unwrap(), 3);
        assert_eq!(fibonacci_index(std::f64::consts::E).unwrap(), 1);
        assert!(fibonacci_index(1.0).is_err());
        let mut prev = 0;
        for i in 1..400 {
            let m = 1.0 + (i as f64).powi(4);
            let p = fibonacci_index(m).unwrap();
            assert!(p >= prev);
            // F_p <= 2 sqrt(log M)
            assert!(fib_u64(p) as f64 <= 2.0 * m.ln().sqrt().max(0.5) + 1e-9);
            prev = p;
        }
    }

    #[test]
    fn padded_words_match_filter_oracle() {
        for p in 0..4 {
            let got: std::collections::BTreeSet<_> = padded_words(&ab12(), p, 20, 400).into_iter().collect();
            let q = EnumerationQuery::new(ab12(), 400u32, Parity::EvenOnly, Emit::Words);
            let expect: std::collections::BTreeSet<_> = enumerate_bounded(&q)
                .filter(|(w, c)| {
                    let d = w.digits();
                    let p = p as usize;
                    *c >= 20u32.into() && d.len() >= p && d[..p].iter().all(|&x| x == 1) && d[d.len() - p..].iter().all(|&x| x == 1)
                })
                .map(|(w, c)| (w.digits().to_vec(), c.to_u64().unwrap()))
                .collect();
            assert_eq!(got, expect, "p = {p}");
        }
    }

    #[test]
    fn toy_xi_properties() {
        let mode = ConstantsMode::relaxed().with_override("p", 2.0).unwrap();
        let xi = build_xi(500.0, &ab12(), &mode).unwrap();
        assert!(!xi.is_empty());
        let floor = xi.shell_floor();
        for (w, m) in xi.members.iter().zip(&xi.matrices) {
            let d = w.digits();
            assert_eq!(d.len(), xi.k);
            assert_eq!(&d[..2], &[1, 1]);
            assert_eq!(&d[d.len() - 2..], &[1, 1]);
            let c = continuant(w).to_u64().unwrap();
            assert_eq!(c as u128, m[3]);
            assert!(c <= xi.l && c as f64 >= floor);
        }
        assert!(xi.l as f64 >= 500.0 / 256.0 && xi.l <= 500);
        let g = golden_ratio_check(&xi, &mode).unwrap();
        assert!(g.within_mechanism, "{g:?}");
    }

    #[test]
    fn step3_matches_bruteforce_over_all_l() {
        let mode = ConstantsMode::relaxed().with_override("p", 2.0).unwrap();
        for m in [300.0, 500.0, 2000.0] {
            let xi = build_xi(m, &ab12(), &mode).unwrap();
            let s2 = padded_words(&ab12(), 2, (m / 256.0f64).ceil() as u64, m as u64);
            let w = 256.0;
            let count = |l: u64| {
                s2.iter()
                    .filter(|e| e.1 <= l && e.1 as f64 >= (m / w).max(shell_floor(l as f64)))
                    .count()
            };
            let best = ((m / w).ceil() as u64..=m as u64)
                .rev()
                .find(|&l| count(l) as f64 >= xi.shell_threshold)
                .unwrap();
            assert_eq!(xi.l, best, "M = {m}");
        }
    }

    #[test]
    fn infeasible_when_window_empty() {
        let mode = ConstantsMode::relaxed().with_override("p", 5.0).unwrap();
        let e = build_xi(6.0, &ab12(), &mode).unwrap_err();
        assert!(matches!(e, Error::Infeasible { step: "S2", .. }), "{e}");
    }

    #[test]
    fn literal_requires_large_m() {
        let e = build_xi(1000.0, &ab12(), &ConstantsMode::literal(0.53)).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }

    #[test]
    fn golden_examples() {
        let mode = ConstantsMode::relaxed();
        let w: Word = "1,1,2,1,1".parse().unwrap();
        let xi = PreEnsemble::from_members(10.0, 10, 2, 1.0, vec![w]).unwrap();
        let g = golden_ratio_check(&xi, &mode).unwrap();
        assert!(g.within_mechanism);
        assert!((g.mechanism_bound - (1.0 + (0.5 - 0.6180339887498949f64).abs())).abs() < 1e-12);

        // all-ones word of length k: deviation below 1/F_{k+1}^2
        for k in 2..30u32 {
            let w = Word::ones(k as usize);
            let xi = PreEnsemble::from_members(10.0, 10, k, 1.0, vec![w]).unwrap();
            let g = golden_ratio_check(&xi, &mode).unwrap();
            let f = fib_u64(k + 1) as f64;
            assert!(g.max_dev_b < 1.0 / (f * f));
        }
        let xi = PreEnsemble::from_members(10.0, 10, 0, 1.0, vec!["2,2".parse().unwrap()]).unwrap();
        assert!(golden_ratio_check(&xi, &mode).unwrap().skipped);
    }
}
