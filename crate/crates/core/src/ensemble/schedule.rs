use serde::{Deserialize, Serialize};

use super::ConstantsMode;
use crate::error::{Error, Result};

/// The sequence `N_{-J-1}, …, N_{J+1}`, stored as natural logarithms so that
/// astronomically large `N` can be handled symbolically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub ln_n: f64,
    pub eps0: f64,
    pub j: i64,
    /// `ln N_m` for `m = -J-1 ..= J+1`.
    ln_values: Vec<f64>,
}

/// Worst relative errors seen while checking the schedule identities.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScheduleCheck {
    pub branch_agreement: f64,
    pub product_identity: f64,
    pub ratio_identity: f64,
    pub ratio_power_identity: f64,
    pub power_identity: f64,
    pub monotone_ok: bool,
}

impl ScheduleCheck {
    pub fn max_error(&self) -> f64 {
        [
            self.branch_agreement,
            self.product_identity,
            self.ratio_identity,
            self.ratio_power_identity,
            self.power_identity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Convenience wrapper taking `N` itself.
pub fn schedule(n: f64, eps0: f64, mode: &ConstantsMode) -> Result<Schedule> {
    Schedule::from_ln(n.ln(), eps0, mode, None)
}

/// `|a - b|` relative to `max(1, |a|, |b|)`.
fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

const TOL: f64 = 1e-13;

impl Schedule {
    /// Builds the schedule for `N = exp(ln_n)`.
    ///
    /// `J` comes from the flooring formula (with `A = alphabet_max`,
    /// default 2) unless the `J` override is set.
    pub fn from_ln(ln_n: f64, eps0: f64, mode: &ConstantsMode, alphabet_max: Option<u32>) -> Result<Self> {
        mode.check_epsilon(eps0)?;
        if !(ln_n > 0.0) || !ln_n.is_finite() {
            return Err(Error::Precondition(format!("log N = {ln_n} must be positive and finite")));
        }
        let a = alphabet_max.unwrap_or(2) as f64;
        let j = match mode.get("J") {
            Some(v) => v as i64,
            None => {
                let num = ln_n.ln() - 4.0 * (10.0 * a).ln() + 2.0 * eps0.ln();
                (num / -(1.0 - eps0).ln()).floor() as i64
            }
        };
        if j < 1 {
            return Err(Error::ScheduleTooShort(j));
        }
        if mode.is_literal() && j < 10 {
            return Err(Error::ScheduleTooShort(j));
        }
        let mut ln_values = Vec::with_capacity(2 * j as usize + 3);
        for m in -j - 1..=j + 1 {
            ln_values.push(if m == j + 1 {
                ln_n
            } else if m <= 1 {
                lower_branch(ln_n, eps0, m)
            } else {
                upper_branch(ln_n, eps0, m)
            });
        }
        let s = Schedule {
            ln_n,
            eps0,
            j,
            ln_values,
        };
        let check = s.verify();
        if check.max_error() > TOL || !check.monotone_ok {
            return Err(Error::ScheduleIdentity(format!("{check:?}")));
        }
        Ok(s)
    }

    pub fn layers(&self) -> usize {
        2 * self.j as usize + 1
    }

    /// `ln N_m` for `-J-1 <= m <= J+1`.
    pub fn ln_at(&self, m: i64) -> f64 {
        assert!(m >= -self.j - 1 && m <= self.j + 1, "index {m} outside the schedule");
        self.ln_values[(m + self.j + 1) as usize]
    }

    /// `N_m` as a float; infinite when it overflows.
    pub fn at(&self, m: i64) -> f64 {
        self.ln_at(m).exp()
    }

    pub fn ln_values(&self) -> &[f64] {
        &self.ln_values
    }

    /// Checks the branch agreement and the identities relating the `N_m`.
    pub fn verify(&self) -> ScheduleCheck {
        let (jj, e, ln_n) = (self.j, self.eps0, self.ln_n);
        let mut c = ScheduleCheck {
            monotone_ok: true,
            ..Default::default()
        };
        let up = |v: &mut f64, x: f64| *v = v.max(x);
        for m in [0, 1] {
            if m <= jj {
                up(&mut c.branch_agreement, rel(lower_branch(ln_n, e, m), upper_branch(ln_n, e, m)));
            }
        }
        // N_{-m} N_{m+1} = N
        for m in -jj..=jj - 1 {
            up(&mut c.product_identity, rel(self.ln_at(-m) + self.ln_at(m + 1), ln_n));
        }
        for m in -jj - 1..=jj - 1 {
            // compared as ln N_{m+1} against ln N_m + ln(ratio), avoiding cancellation
            let (lo, hi) = (self.ln_at(m), self.ln_at(m + 1));
            // N_{m+1}/N_m = N_{m+1}^ε for m <= 0, (N/N_m)^ε for m >= 0
            if m <= 0 {
                up(&mut c.ratio_power_identity, rel(hi, lo + e * hi));
            }
            if m >= 0 {
                up(&mut c.ratio_power_identity, rel(hi, lo + e * (ln_n - lo)));
            }
            let expect = ln_n * e / (2.0 - e) * pow1m(e, m.abs());
            up(&mut c.ratio_identity, rel(hi, lo + expect));
            // N_m >= N_{m+1}^{1-ε}
            let rhs = (1.0 - e) * self.ln_at(m + 1);
            if self.ln_at(m) < rhs - TOL * rhs.abs().max(1.0) {
                c.monotone_ok = false;
            }
        }
        // N_{h-J}^{(1-ε)^{h-j}} = N_{j-J} for -1 <= j < h <= J+1
        for j in -1..=jj + 1 {
            for h in j + 1..=jj + 1 {
                let lhs = pow1m(e, h - j) * self.ln_at(h - jj);
                up(&mut c.power_identity, rel(lhs, self.ln_at(j - jj)));
            }
        }
        c
    }

    /// Smallest `j` in `range` with `N_{j-J}^{1-ε} <= M <= N_{j-J}`.
    pub fn split_index(&self, ln_m: f64, range: std::ops::RangeInclusive<i64>) -> Option<i64> {
        range.into_iter().find(|&j| {
            let l = self.ln_at(j - self.j);
            (1.0 - self.eps0) * l <= ln_m + TOL * l.abs().max(1.0) && ln_m <= l + TOL * l.abs().max(1.0)
        })
    }
}

/// `(1-ε)^k`, accurate for large `k`.
fn pow1m(e: f64, k: i64) -> f64 {
    (k as f64 * (-e).ln_1p()).exp()
}

/// `ln N_m = (1-ε)^{1-m}/(2-ε) · ln N` for `-1-J <= m <= 1`.
fn lower_branch(ln_n: f64, e: f64, m: i64) -> f64 {
    ln_n * pow1m(e, 1 - m) / (2.0 - e)
}

/// `ln N_m = (1 - (1-ε)^m/(2-ε)) · ln N` for `0 <= m <= J`.
fn upper_branch(ln_n: f64, e: f64, m: i64) -> f64 {
    ln_n * (1.0 - pow1m(e, m) / (2.0 - e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relaxed_j(j: f64) -> ConstantsMode {
        ConstantsMode::relaxed().with_override("J", j).unwrap()
    }

    #[test]
    fn relaxed_identities() {
        let s = schedule(1e6, 0.2, &relaxed_j(3.0)).unwrap();
        assert_eq!(s.j, 3);
        assert_eq!(s.ln_values().len(), 9);
        assert!((s.at(4) / 1e6 - 1.0).abs() < 1e-12);
        let n1 = 1e6f64.powf(1.0 / 1.8);
        assert!((s.at(1) / n1 - 1.0).abs() < 1e-12);
        let c = s.verify();
        assert!(c.max_error() < 1e-13 && c.monotone_ok, "{c:?}");
        // the sequence increases
        assert!(s.ln_values().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn identities_in_n_space() {
        // 12 significant digits on the values themselves
        let s = schedule(1e6, 0.2, &relaxed_j(3.0)).unwrap();
        for m in -3..=2 {
            let prod = s.at(-m) * s.at(m + 1);
            assert!((prod / 1e6 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn literal_dry_run() {
        let mode = ConstantsMode::literal(0.8889);
        // J from the flooring formula needs an enormous log N
        let s = Schedule::from_ln(1e15, 1.0 / 3000.0, &mode, Some(7)).unwrap();
        assert!(s.j >= 10);
        assert!(s.verify().max_error() < 1e-13);
        let short = Schedule::from_ln(1e6, 1.0 / 3000.0, &mode, Some(7)).unwrap_err();
        assert!(matches!(short, Error::ScheduleTooShort(_)));
    }

    #[test]
    fn too_short_relaxed() {
        let e = schedule(1e6, 0.2, &ConstantsMode::relaxed()).unwrap_err();
        assert!(matches!(e, Error::ScheduleTooShort(_)));
    }

    #[test]
    fn split_window_endpoint() {
        let s = schedule(1e12, 0.5, &relaxed_j(2.0)).unwrap();
        for j in 1..=4 {
            assert_eq!(s.split_index(s.ln_at(j - 2), 1..=4), Some(j));
        }
        assert_eq!(s.split_index(0.0, 1..=4), None);
    }
}
