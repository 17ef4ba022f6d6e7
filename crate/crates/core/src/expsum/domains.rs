use std::collections::BTreeMap;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::spectrum::{eval_s, parseval, Spectrum};
use crate::error::{Error, Result};
use crate::precision;

/// `ν = (√369 - 7)/20`
pub fn nu() -> f64 {
    (369f64.sqrt() - 7.0) / 20.0
}

/// Exponents of `N` at which the domain boundaries sit (`γ = 1 - δ`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryExponents {
    /// `2γ + 6ε`, the exponent of `ξ₁`
    pub xi1: f64,
    /// `γ + 4ε`
    pub g4: f64,
    /// `γ + 6ε`
    pub g6: f64,
    /// `2γ + 9ε`
    pub g2_9: f64,
    /// `3γ + 11ε`
    pub g3_11: f64,
    /// `3γ + 12ε`
    pub g3_12: f64,
    /// `4γ + 14ε`
    pub g4_14: f64,
    /// `4γ + 15ε`
    pub g4_15: f64,
    /// `(2γ + 6ε)/(ν + 1)`, the exponent of `Q_C`
    pub qc: f64,
}

impl BoundaryExponents {
    pub fn new(gamma: f64, eps: f64) -> Self {
        let xi1 = 2.0 * gamma + 6.0 * eps;
        BoundaryExponents {
            xi1,
            g4: gamma + 4.0 * eps,
            g6: gamma + 6.0 * eps,
            g2_9: 2.0 * gamma + 9.0 * eps,
            g3_11: 3.0 * gamma + 11.0 * eps,
            g3_12: 3.0 * gamma + 12.0 * eps,
            g4_14: 4.0 * gamma + 14.0 * eps,
            g4_15: 4.0 * gamma + 15.0 * eps,
            qc: xi1 / (nu() + 1.0),
        }
    }
}

/// The nine regions of the `(q, |K|)` plane, `Q₀ < q <= √N`, `Q₀/q <= |K| <= √N/q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainGeometry {
    pub n: f64,
    pub gamma: f64,
    pub eps0: f64,
    pub q0: f64,
    pub exponents: BoundaryExponents,
}

/// `(q_lo, q_hi]` and a `|K|` interval depending on `q`.
struct Region {
    q: (f64, f64),
    k: fn(&DomainGeometry, f64) -> (f64, f64),
}

impl DomainGeometry {
    pub fn new(n: f64, delta: f64, eps0: f64, q0: f64) -> Result<Self> {
        if !(n > 1.0) || !(delta > 0.0 && delta < 1.0) || !(eps0 > 0.0) || !(q0 >= 1.0) {
            return Err(Error::Precondition(format!(
                "need N > 1, 0 < delta < 1, eps0 > 0, Q0 >= 1 (got {n}, {delta}, {eps0}, {q0})"
            )));
        }
        let gamma = 1.0 - delta;
        Ok(DomainGeometry {
            n,
            gamma,
            eps0,
            q0,
            exponents: BoundaryExponents::new(gamma, eps0),
        })
    }

    fn pw(&self, e: f64) -> f64 {
        self.n.powf(e)
    }

    fn sqrt_n(&self) -> f64 {
        self.n.sqrt()
    }

    pub fn xi1(&self) -> f64 {
        self.pw(self.exponents.xi1)
    }

    pub fn q_c(&self) -> f64 {
        self.pw(self.exponents.qc)
    }

    fn region(&self, d: u8) -> Region {
        let e = &self.exponents;
        let (q0, sn, xi1) = (self.q0, self.sqrt_n(), self.xi1());
        match d {
            1 => Region {
                q: (q0, sn),
                k: |g, q| (g.xi1(), g.sqrt_n() / q),
            },
            2 => Region {
                q: (self.pw(e.g2_9), self.pw(e.g4_14)),
                k: |g, q| (g.pw(g.exponents.g4_15) / q, g.sqrt_n() / q),
            },
            3 => Region {
                q: (self.pw(e.g4_14), sn),
                k: |g, q| (g.q0 / q, g.sqrt_n() / q),
            },
            4 => Region {
                q: (self.pw(e.g6), self.pw(e.g2_9)),
                k: |g, q| (g.pw(g.exponents.g3_12) / q, g.xi1()),
            },
            5 => Region {
                q: (self.pw(e.g2_9), self.pw(e.g3_11)),
                k: |g, q| (g.pw(g.exponents.g4), g.pw(g.exponents.g4_15) / q),
            },
            6 => Region {
                q: (xi1, self.pw(e.g4_14)),
                k: |g, q| (g.q0 / q, g.pw(g.exponents.g6).min(g.pw(g.exponents.g4_15) / q)),
            },
            7 => Region {
                q: (q0, xi1),
                k: |g, q| (g.xi1() / q, g.xi1().min(g.pw(g.exponents.g3_12) / q)),
            },
            8 => Region {
                q: (q0, xi1),
                k: |g, q| (g.q0 / q, q.powf(nu()).min(g.xi1() / q)),
            },
            9 => Region {
                q: (q0, self.q_c()),
                k: |g, q| (q.powf(nu()), g.xi1() / q),
            },
            _ => unreachable!("domains are numbered 1..=9"),
        }
    }

    fn in_region(&self, d: u8, q: f64, k_abs: f64) -> bool {
        let r = self.region(d);
        if !(q > r.q.0 && q <= r.q.1) {
            return false;
        }
        let (lo, hi) = (r.k)(self, q);
        k_abs >= lo && k_abs <= hi
    }

    /// First domain containing `(q, |K|)`, or `None` outside all nine.
    pub fn domain_of(&self, q: f64, k_abs: f64) -> Option<u8> {
        (1..=9).find(|&d| self.in_region(d, q, k_abs))
    }

    /// Inside the outer region `Q₀ < q <= √N`, `Q₀/q <= |K| <= √N/q`.
    pub fn in_outer(&self, q: f64, k_abs: f64) -> bool {
        q > self.q0 && q <= self.sqrt_n() && k_abs >= self.q0 / q && k_abs <= self.sqrt_n() / q
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DomainStats {
    pub points: usize,
    pub attempts: usize,
    /// Mean and max of `|S(a/q + K/N)|² / S(0)²` over the sampled points.
    pub mean_normalized: f64,
    pub max_normalized: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NineDomainReport {
    pub n: u64,
    pub delta: f64,
    pub eps0: f64,
    pub q0: f64,
    pub seed: u64,
    pub samples_per_domain: usize,
    pub exponents: BoundaryExponents,
    pub total: u128,
    pub support: usize,
    pub parseval: u128,
    /// `N · parseval / total²`, and the same as an exact fraction.
    pub r: f64,
    pub r_exact: String,
    pub non_equidistributed: bool,
    /// Keyed by domain index 1 to 9.
    pub domains: BTreeMap<u8, DomainStats>,
    /// Share of points drawn from the outer region that fall in no domain.
    pub unassigned_fraction: f64,
}

pub struct NineDomainConfig {
    pub n: u64,
    pub delta: f64,
    pub eps0: f64,
    pub q0: f64,
    pub seed: u64,
    pub samples_per_domain: usize,
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

/// Draws an integer `q` in `(lo, hi]`, log-uniformly.
fn draw_q(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Option<u64> {
    if !(lo >= 0.0 && lo < hi && hi < 2f64.powi(63)) {
        return None;
    }
    let qlo = lo.floor() as u64 + 1;
    let qhi = hi.floor() as u64;
    if qlo > qhi {
        return None;
    }
    if qlo == qhi {
        return Some(qlo);
    }
    let x = log_uniform(rng, qlo as f64, qhi as f64 + 1.0);
    Some((x.floor() as u64).clamp(qlo, qhi))
}

fn draw_a(rng: &mut ChaCha8Rng, q: u64) -> u64 {
    if q == 1 {
        return rng.gen_range(0..=1);
    }
    loop {
        let a = rng.gen_range(1..q);
        if a.gcd(&q) == 1 {
            return a;
        }
    }
}

/// Samples arc points in each domain and records `|S|²` there, plus the
/// global ratio `R`. Measurement only; nothing is asserted.
pub fn nine_domain_report(spec: &Spectrum, cfg: &NineDomainConfig) -> Result<NineDomainReport> {
    let geo = DomainGeometry::new(cfg.n as f64, cfg.delta, cfg.eps0, cfg.q0)?;
    let total = spec.total();
    if total == 0 {
        return Err(Error::UndefinedBound);
    }
    let pars = parseval(spec);
    let r_exact = super::spectrum::equidistribution_ratio(spec, cfg.n)?;
    let r = precision::rational_to_f64(&r_exact);
    let total_sq = (total as f64) * (total as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut domains = BTreeMap::new();

    for d in 1..=9u8 {
        let region = geo.region(d);
        let mut stats = DomainStats::default();
        let mut sum = 0.0;
        let max_attempts = 50 * cfg.samples_per_domain.max(1);
        while stats.points < cfg.samples_per_domain && stats.attempts < max_attempts {
            stats.attempts += 1;
            let Some(q) = draw_q(&mut rng, region.q.0.max(geo.q0), region.q.1.min(geo.sqrt_n())) else {
                break;
            };
            let (klo, khi) = (region.k)(&geo, q as f64);
            let klo = klo.max(geo.q0 / q as f64);
            let khi = khi.min(geo.sqrt_n() / q as f64);
            if !(klo > 0.0 && klo <= khi) {
                continue;
            }
            let k_abs = log_uniform(&mut rng, klo, khi);
            if geo.domain_of(q as f64, k_abs) != Some(d) {
                continue;
            }
            let a = draw_a(&mut rng, q);
            let k = if rng.gen::<bool>() { k_abs } else { -k_abs };
            let theta = a as f64 / q as f64 + k / cfg.n as f64;
            let v = eval_s(theta, spec).norm_sqr() / total_sq;
            sum += v;
            stats.max_normalized = stats.max_normalized.max(v);
            stats.points += 1;
        }
        if stats.points > 0 {
            stats.mean_normalized = sum / stats.points as f64;
        }
        domains.insert(d, stats);
    }

    // coverage of the outer region by the nine domains
    let sn = geo.sqrt_n();
    let mut outside = 0usize;
    let mut drawn = 0usize;
    for _ in 0..cfg.samples_per_domain.max(1) * 9 {
        let Some(q) = draw_q(&mut rng, geo.q0, sn) else {
            break;
        };
        let (klo, khi) = (geo.q0 / q as f64, sn / q as f64);
        if klo > khi {
            continue;
        }
        let k_abs = log_uniform(&mut rng, klo, khi);
        drawn += 1;
        if geo.domain_of(q as f64, k_abs).is_none() {
            outside += 1;
        }
    }

    Ok(NineDomainReport {
        n: cfg.n,
        delta: cfg.delta,
        eps0: cfg.eps0,
        q0: cfg.q0,
        seed: cfg.seed,
        samples_per_domain: cfg.samples_per_domain,
        exponents: geo.exponents.clone(),
        total,
        support: spec.support(),
        parseval: pars,
        r,
        r_exact: r_exact.to_string(),
        non_equidistributed: r > (cfg.n as f64).sqrt(),
        domains,
        unassigned_fraction: if drawn == 0 { 0.0 } else { outside as f64 / drawn as f64 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents_by_hand() {
        let (g, e) = (1.0 - 0.8889, 1e-3);
        let x = BoundaryExponents::new(g, e);
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        assert!(close(x.xi1, 0.2222 + 0.006));
        assert!(close(x.g4, 0.1111 + 0.004));
        assert!(close(x.g6, 0.1111 + 0.006));
        assert!(close(x.g2_9, 0.2222 + 0.009));
        assert!(close(x.g3_11, 0.3333 + 0.011));
        assert!(close(x.g3_12, 0.3333 + 0.012));
        assert!(close(x.g4_14, 0.4444 + 0.014));
        assert!(close(x.g4_15, 0.4444 + 0.015));
        assert!(close(x.qc, 0.2282 / (1.0 + (369f64.sqrt() - 7.0) / 20.0)));
        assert!(close(nu(), 0.6104686356149273));
    }

    #[test]
    fn domain_assignment() {
        let g = DomainGeometry::new(1e40, 0.8889, 1e-3, 1.0).unwrap();
        assert_eq!(g.domain_of(1e19, 0.5), Some(3));
        let q = 10.0;
        assert_eq!(g.domain_of(q, g.xi1() * 1.01), Some(1));
        assert_eq!(g.domain_of(q, 0.2), Some(8));
        assert_eq!(g.domain_of(0.5, 1.0), None);
        assert!(g.in_outer(q, 1.0));
    }

    #[test]
    fn single_norm_spectrum_is_flagged() {
        let spec = Spectrum::from_entries([(5, 9)]).unwrap();
        let cfg = NineDomainConfig {
            n: 10_000,
            delta: 0.8889,
            eps0: 1e-3,
            q0: 1.0,
            seed: 1,
            samples_per_domain: 20,
        };
        let rep = nine_domain_report(&spec, &cfg).unwrap();
        assert_eq!(rep.r, 10_000.0);
        assert!(rep.non_equidistributed);
        let again = nine_domain_report(&spec, &cfg).unwrap();
        assert_eq!(serde_json::to_string(&rep).unwrap(), serde_json::to_string(&again).unwrap());
    }
}
