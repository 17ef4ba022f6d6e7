//! Dimension estimates from the growth of `F_A(x)`, the closed-form
//! approximation for large alphabets, and the threshold constants.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::continuant::{Alphabet, Rational};
use crate::error::{Error, Result};
use crate::precision::{self, Hp};
use crate::semigroup::count_fa;

/// Published dimension of `E_{1..7}`.
pub const DELTA_1_TO_7: f64 = 0.8889;
/// Published dimension of `E_{1..6,8}`.
pub const DELTA_1_TO_6_AND_8: f64 = 0.8851;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub delta: f64,
    pub slope_stderr: f64,
    /// `(x, F_A(x))` pairs used in the fit.
    pub grid: Vec<(u64, u128)>,
}

/// Fits `log F_A(x) = 2δ log x + c` by unweighted least squares.
pub fn estimate_delta(alphabet: &Alphabet, x_grid: &[u64]) -> Result<DimensionEstimate> {
    if x_grid.len() < 3 {
        return Err(Error::Precondition("grid needs at least 3 points".into()));
    }
    if x_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("grid must be strictly increasing".into()));
    }
    let a = alphabet.max_digit() as u64;
    if x_grid[0] < 4 * a * a {
        return Err(Error::Precondition(format!("grid starts below 4A^2 = {}", 4 * a * a)));
    }
    let grid: Vec<(u64, u128)> = x_grid.iter().map(|&x| (x, count_fa(alphabet, x))).collect();
    if let Some((x, _)) = grid.iter().find(|(_, f)| *f == 0) {
        return Err(Error::InsufficientData(format!("F_A({x}) = 0")));
    }
    let pts: Vec<(f64, f64)> = grid.iter().map(|&(x, f)| ((x as f64).ln(), (f as f64).ln())).collect();
    let (slope, stderr) = least_squares(&pts);
    let delta = slope / 2.0;
    if alphabet.contains(1) && alphabet.contains(2) && delta <= 0.5 {
        return Err(Error::Check(format!("fitted delta {delta} is not above 1/2")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Check(format!("fitted delta {delta} is outside (0, 1)")));
    }
    Ok(DimensionEstimate {
        delta,
        slope_stderr: stderr / 2.0,
        grid,
    })
}

/// Slope and its standard error.
fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = if pts.len() > 2 {
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, stderr)
}

/// `1 - 6/(π²A) - 72 log A/(π⁴A²)`, without the `O(1/A²)` remainder.
pub fn hensley_formula(a: u32) -> Result<f64> {
    if a < 2 {
        return Err(Error::Precondition("A must be at least 2".into()));
    }
    let mut hp = Hp::new();
    let pi = hp.pi();
    let pi2 = hp.mul(&pi, &pi);
    let pi4 = hp.mul(&pi2, &pi2);
    let af = hp.int(a as u128);
    let a2 = hp.mul(&af, &af);
    let t1 = hp.div(&hp.int(6), &hp.mul(&pi2, &af));
    let ln_a = hp.ln(&af);
    let t2 = hp.div(&hp.mul(&hp.int(72), &ln_a), &hp.mul(&pi4, &a2));
    let v = hp.sub(&hp.sub(&hp.int(1), &t1), &t2);
    Ok(precision::to_f64(&v))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdVerdict {
    /// `δ > 1 - 5/312`
    pub above_full_coverage: bool,
    /// `δ > 1 - (27 - √633)/16`
    pub above_positive_proportion: bool,
    /// `δ > 1 - 25/(114 + 2√2274)`
    pub above_refined: bool,
    /// `γ = 1 - δ` rendered to 60 digits.
    pub gamma: String,
}

impl ThresholdVerdict {
    pub fn as_tuple(&self) -> (bool, bool, bool) {
        (self.above_full_coverage, self.above_positive_proportion, self.above_refined)
    }
}

/// The three threshold constants rendered to `digits` places.
pub fn threshold_constants(digits: u32) -> [(&'static str, String); 3] {
    let (lo633, _) = precision::sqrt_bracket(633, digits + 10);
    let (lo2274, _) = precision::sqrt_bracket(2274, digits + 10);
    let one = Rational::one();
    let r = |n: i64| Rational::from_integer(BigInt::from(n));
    let c1 = &one - Rational::new(5.into(), 312.into());
    let c2 = &one - (r(27) - lo633) / r(16);
    let c3 = &one - r(25) / (r(114) + r(2) * lo2274);
    let d = digits as usize;
    [
        ("1-5/312", precision::rational_decimal(&c1, d)),
        ("1-(27-sqrt633)/16", precision::rational_decimal(&c2, d)),
        ("1-25/(114+2sqrt2274)", precision::rational_decimal(&c3, d)),
    ]
}

/// Compares `delta` with the three constants exactly: the radicals are
/// eliminated by squaring, so no rounding is involved.
pub fn threshold_check(delta: f64) -> Result<ThresholdVerdict> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Precondition(format!("delta = {delta} is outside (0, 1)")));
    }
    Ok(threshold_check_exact(&precision::rational_from_f64(delta)))
}

pub fn threshold_check_exact(delta: &Rational) -> ThresholdVerdict {
    let r = |n: i64| Rational::from_integer(BigInt::from(n));
    let gamma = r(1) - delta;

    let above_full_coverage = *delta > r(307) / r(312);

    // δ > 1 - (27-√633)/16  ⟺  16δ + 11 > √633
    let lhs = r(16) * delta + r(11);
    let above_positive_proportion = lhs.is_positive() && &lhs * &lhs > r(633);

    // δ > 1 - 25/(114+2√2274)  ⟺  25 - 114γ > 2γ√2274
    let t = r(25) - r(114) * &gamma;
    let above_refined = if gamma.is_negative() {
        // γ < 0 means δ > 1
        true
    } else {
        t.is_positive() && &t * &t > r(4) * &gamma * &gamma * r(2274)
    };

    ThresholdVerdict {
        above_full_coverage,
        above_positive_proportion,
        above_refined,
        gamma: precision::rational_decimal(&gamma, 60),
    }
}

/// Report written by the `dimension` command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DimensionReport {
    pub alphabet: Alphabet,
    pub grid: Vec<(u64, u128)>,
    pub delta: f64,
    pub stderr: f64,
    pub thresholds: ThresholdVerdict,
}

pub fn dimension_report(alphabet: &Alphabet, x_grid: &[u64]) -> Result<DimensionReport> {
    let est = estimate_delta(alphabet, x_grid)?;
    let thresholds = threshold_check(est.delta)?;
    Ok(DimensionReport {
        alphabet: alphabet.clone(),
        grid: est.grid,
        delta: est.delta,
        stderr: est.slope_stderr,
        thresholds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_check(0.8889).unwrap().as_tuple(), (false, true, true));
        assert_eq!(threshold_check(0.99).unwrap().as_tuple(), (true, true, true));
        let exact = Rational::new(8849.into(), 10000.into());
        assert_eq!(threshold_check_exact(&exact).as_tuple(), (false, false, true));
    }

    #[test]
    fn threshold_constants_decimals() {
        let [c1, c2, c3] = threshold_constants(50);
        assert!(c1.1.starts_with("0.98397435897435897435"));
        assert!(c2.1.starts_with("0.8849"));
        assert!(c3.1.starts_with("0.8805"));
        // each constant sits exactly on the boundary of its own verdict
        let just_above = |s: &str| {
            let v: f64 = s.parse().unwrap();
            threshold_check(v + 1e-12).unwrap()
        };
        assert!(just_above(&c2.1).above_positive_proportion);
        assert!(just_above(&c3.1).above_refined);
        assert!(!threshold_check(c3.1.parse::<f64>().unwrap() - 1e-12).unwrap().above_refined);
    }

    #[test]
    fn thresholds_monotone() {
        let mut prev = (false, false, false);
        for i in 1..1000 {
            let v = threshold_check(i as f64 / 1000.0).unwrap().as_tuple();
            assert!(v.0 >= prev.0 && v.1 >= prev.1 && v.2 >= prev.2);
            prev = v;
        }
    }

    #[test]
    fn hensley_formula_values() {
        assert!((hensley_formula(50).unwrap() - 0.98668).abs() < 1e-5);
        let mut prev = hensley_formula(3).unwrap();
        for a in 4..=1000 {
            let v = hensley_formula(a).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(prev < 1.0 && prev > 0.999);
        assert!(hensley_formula(1).is_err());
    }

    #[test]
    fn least_squares_exact_line() {
        let pts = [(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)];
        let (s, e) = least_squares(&pts);
        assert!((s - 2.0).abs() < 1e-12 && e < 1e-12);
    }

    #[test]
    fn grid_validation() {
        let a = Alphabet::range(7).unwrap();
        assert!(estimate_delta(&a, &[1000, 10_000]).is_err());
        assert!(estimate_delta(&a, &[1000, 1000, 10_000]).is_err());
        assert!(estimate_delta(&a, &[100, 1000, 10_000]).is_err());
    }

    #[test]
    #[ignore]
    fn print_fits() {
        for al in ["1..2", "1..3", "1..4", "1..5", "1..6", "1..7", "1,2,3,4,5,6,8"] {
            let a: Alphabet = al.parse().unwrap();
            let e = estimate_delta(&a, &[1000, 10_000, 100_000]).unwrap();
            let e2 = estimate_delta(&a, &[2000, 20_000, 200_000]).unwrap();
            eprintln!("{al}: {} {} | {} {:?}", e.delta, e.slope_stderr, e2.delta, e.grid);
        }
    }
}
