use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::continuant::{continuant_u64, Rational, Word};
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};

/// Multiplicities `Ŝ(n)` of the norms of a finite set of matrices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spectrum {
    entries: BTreeMap<u64, u64>,
}

impl Spectrum {
    pub fn from_norms<I: IntoIterator<Item = u64>>(norms: I) -> Self {
        let mut entries = BTreeMap::new();
        for n in norms {
            *entries.entry(n).or_insert(0) += 1;
        }
        Spectrum { entries }
    }

    /// From explicit `(norm, multiplicity)` pairs; zero multiplicities are dropped.
    pub fn from_entries<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, m) in pairs {
            if n == 0 {
                return Err(Error::InvalidInput("norm 0 in spectrum".into()));
            }
            if m > 0 {
                *entries.entry(n).or_insert(0) += m;
            }
        }
        Ok(Spectrum { entries })
    }

    pub fn from_words(words: &[Word]) -> Result<Self> {
        let norms: Option<Vec<u64>> = words
            .iter()
            .map(|w| continuant_u64(w.digits()))
            .collect();
        norms
            .map(Spectrum::from_norms)
            .ok_or_else(|| Error::TooLarge("continuant above u64".into()))
    }

    /// Norms of every product of the ensemble, merged across threads.
    pub fn from_ensemble(om: &Ensemble) -> Result<Self> {
        let norms = om.product_norms()?;
        let parts = norms
            .par_chunks(1 << 16)
            .map(|chunk| {
                let mut m = BTreeMap::new();
                for &n in chunk {
                    let n = u64::try_from(n).map_err(|_| Error::TooLarge(format!("norm {n}")))?;
                    *m.entry(n).or_insert(0u64) += 1;
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut entries = BTreeMap::new();
        for part in parts {
            for (n, c) in part {
                *entries.entry(n).or_insert(0) += c;
            }
        }
        Ok(Spectrum { entries })
    }

    pub fn entries(&self) -> &BTreeMap<u64, u64> {
        &self.entries
    }

    pub fn get(&self, n: u64) -> u64 {
        self.entries.get(&n).copied().unwrap_or(0)
    }

    /// `Σ Ŝ(n)`, the size of the source set.
    pub fn total(&self) -> u128 {
        self.entries.values().map(|&m| m as u128).sum()
    }

    pub fn support(&self) -> usize {
        self.entries.len()
    }

    pub fn max_norm(&self) -> u64 {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,multiplicity")?;
        for (n, m) in &self.entries {
            writeln!(out, "{n},{m}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        match lines.next() {
            Some(Ok(h)) if h.trim() == "n,multiplicity" => {}
            _ => return Err(Error::Parse("missing spectrum header".into())),
        }
        let mut pairs = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let (n, m) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: expected n,multiplicity", i + 2)))?;
            let n = n.trim().parse().map_err(|_| Error::Parse(format!("line {}: bad norm", i + 2)))?;
            let m = m.trim().parse().map_err(|_| Error::Parse(format!("line {}: bad multiplicity", i + 2)))?;
            pairs.push((n, m));
        }
        Spectrum::from_entries(pairs)
    }
}

/// `frac(n·θ)` without losing the low bits of the product.
pub(crate) fn frac_mul(n: u64, theta: f64) -> f64 {
    let nf = n as f64;
    let p = nf * theta;
    let err = nf.mul_add(theta, -p);
    let f = (p - p.floor()) + err;
    f - f.floor()
}

/// `e(x) = exp(2πix)` for `x` already reduced mod 1.
pub(crate) fn e_frac(f: f64) -> Complex64 {
    let a = std::f64::consts::TAU * f;
    Complex64::new(a.cos(), a.sin())
}

/// `S(θ) = Σ_n Ŝ(n) e(nθ)`.
pub fn eval_s(theta: f64, spec: &Spectrum) -> Complex64 {
    let t = theta - theta.floor();
    if t == 0.0 {
        return Complex64::new(spec.total() as f64, 0.0);
    }
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    for (&n, &m) in spec.entries() {
        let z = e_frac(frac_mul(n, t));
        re.add(m as f64 * z.re);
        im.add(m as f64 * z.im);
    }
    Complex64::new(re.sum(), im.sum())
}

/// Compensated summation.
#[derive(Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn sum(&self) -> f64 {
        self.sum + self.c
    }
}

/// `Σ Ŝ(n)² = ∫_0^1 |S(θ)|² dθ`, exactly.
pub fn parseval(spec: &Spectrum) -> u128 {
    spec.entries().values().map(|&m| (m as u128) * (m as u128)).sum()
}

/// Midpoint rule for `∫_0^1 |S|²` with `nodes` points. Exact (up to
/// rounding) once `nodes` exceeds the largest norm difference.
pub fn parseval_quadrature(spec: &Spectrum, nodes: usize) -> f64 {
    let parts: Vec<f64> = (0..nodes)
        .into_par_iter()
        .map(|i| eval_s((i as f64 + 0.5) / nodes as f64, spec).norm_sqr())
        .collect();
    let mut acc = Neumaier::default();
    for p in parts {
        acc.add(p);
    }
    acc.sum() / nodes as f64
}

/// `S(0)² / Σ Ŝ(n)²`, a lower bound for the support size.
pub fn density_lower_bound(spec: &Spectrum) -> Result<Rational> {
    let total = spec.total();
    if total == 0 {
        return Err(Error::UndefinedBound);
    }
    let bound = Rational::new((total * total).into(), parseval(spec).into());
    if bound > Rational::from_integer(spec.support().into()) {
        return Err(Error::Check(format!("density bound {bound} exceeds support {}", spec.support())));
    }
    Ok(bound)
}

/// `R = N · Σ Ŝ(n)² / S(0)²`.
pub fn equidistribution_ratio(spec: &Spectrum, n: u64) -> Result<Rational> {
    let lb = density_lower_bound(spec)?;
    Ok(Rational::from_integer(n.into()) / lb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuant::continuant;
    use crate::semigroup::{enumerate_bounded, Emit, EnumerationQuery, Parity};
    use crate::Alphabet;

    fn ten_words() -> Vec<Word> {
        let q = EnumerationQuery::new(Alphabet::range(2).unwrap(), 10u32, Parity::EvenOnly, Emit::Words);
        enumerate_bounded(&q).map(|e| e.0).collect()
    }

    #[test]
    fn spectrum_examples() {
        let s = Spectrum::from_words(&["1,1".parse().unwrap()]).unwrap();
        assert_eq!(s.entries().iter().map(|(a, b)| (*a, *b)).collect::<Vec<_>>(), vec![(2, 1)]);
        assert_eq!(parseval(&s), 1);
        let s = Spectrum::from_words(&ten_words()).unwrap();
        let e: Vec<_> = s.entries().iter().map(|(a, b)| (*a, *b)).collect();
        assert_eq!(e, vec![(2, 1), (3, 2), (5, 2), (7, 2), (8, 2), (10, 1)]);
        assert_eq!(s.total(), 10);
        assert_eq!(parseval(&s), 18);
        assert_eq!(density_lower_bound(&s).unwrap(), Rational::new(100.into(), 18.into()));
    }

    #[test]
    fn density_examples() {
        let uniform = Spectrum::from_norms([3, 5, 9, 11]);
        assert_eq!(density_lower_bound(&uniform).unwrap(), Rational::from_integer(4.into()));
        let single = Spectrum::from_entries([(5, 7)]).unwrap();
        assert_eq!(density_lower_bound(&single).unwrap(), Rational::from_integer(1.into()));
        assert!(matches!(density_lower_bound(&Spectrum::default()), Err(Error::UndefinedBound)));
        assert_eq!(equidistribution_ratio(&single, 1000).unwrap(), Rational::from_integer(1000.into()));
    }

    #[test]
    fn eval_examples() {
        let s = Spectrum::from_words(&ten_words()).unwrap();
        assert_eq!(eval_s(0.0, &s), Complex64::new(10.0, 0.0));
        let alt: i64 = s.entries().iter().map(|(&n, &m)| if n % 2 == 0 { m as i64 } else { -(m as i64) }).sum();
        let v = eval_s(0.5, &s);
        assert!((v.re - alt as f64).abs() < 1e-12 && v.im.abs() < 1e-12);
        // conjugate symmetry
        let a = eval_s(0.123, &s);
        let b = eval_s(1.0 - 0.123, &s);
        assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn eval_matches_element_sum() {
        let words = ten_words();
        let s = Spectrum::from_words(&words).unwrap();
        for theta in [0.1, 0.37, 0.999, 0.61803] {
            let direct: Complex64 = words
                .iter()
                .map(|w| {
                    let n: u64 = num_traits::ToPrimitive::to_u64(&continuant(w)).unwrap();
                    let a = std::f64::consts::TAU * n as f64 * theta;
                    Complex64::new(a.cos(), a.sin())
                })
                .sum();
            assert!((eval_s(theta, &s) - direct).norm() <= 1e-12 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn quadrature_agrees() {
        let s = Spectrum::from_words(&ten_words()).unwrap();
        let q = parseval_quadrature(&s, 4 * s.max_norm() as usize);
        assert!((q - 18.0).abs() < 1e-9);
    }

    #[test]
    fn csv_round_trip() {
        let s = Spectrum::from_words(&ten_words()).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"n,multiplicity\n2,1\n"));
        assert_eq!(Spectrum::read_csv(&buf[..]).unwrap(), s);
        assert!(Spectrum::read_csv(&b"x\n"[..]).is_err());
    }

    #[test]
    fn frac_mul_precise() {
        use num_traits::ToPrimitive;
        assert_eq!(frac_mul(1_000_000_007, 0.5), 0.5);
        for (n, theta) in [(987_654_321_123u64, 0.1), (1 << 40, 0.3183098861837907), (999_999_999_989, 0.7071)] {
            let exact = Rational::from_integer(n.into()) * Rational::from_float(theta).unwrap();
            let fr = (&exact - exact.floor()).to_f64().unwrap();
            assert!((frac_mul(n, theta) - fr).abs() < 1e-15, "{n} {theta}");
        }
    }
}
