use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::spectrum::{frac_mul, Neumaier};
use crate::error::{Error, Result};

/// `T(x) = max(0, 1 - |x|)`
pub fn kernel_t(x: f64) -> f64 {
    (1.0 - x.abs()).max(0.0)
}

/// `S(x) = (sin πx / πx)²`, `S(0) = 1`. Its Fourier transform is `T`.
pub fn kernel_s(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let y = PI * x;
    let s = y.sin() / y;
    s * s
}

/// `S₂(x) = 3 S(x/2)`, which exceeds 1 on `[-1, 1]`.
pub fn kernel_s2(x: f64) -> f64 {
    3.0 * kernel_s(x / 2.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonReport {
    pub h: f64,
    pub z: f64,
    pub n_max: u64,
    /// `Σ_{|n| <= n_max} S₂(n/H) e(nz)`
    pub lhs: f64,
    /// `6H Σ_k T(2(k - z)H)`
    pub rhs: f64,
    pub residual: f64,
    /// `24H²/(π² n_max)`, bounding the dropped terms.
    pub tail_bound: f64,
    /// Residual after adding the dropped terms in closed form.
    pub corrected_residual: f64,
    /// Number of nonzero `k` terms on the right.
    pub rhs_terms: usize,
}

impl PoissonReport {
    pub fn within_bound(&self) -> bool {
        self.residual <= self.tail_bound + 1e-8
    }
}

/// `Σ_{n>=1} cos(2πnw)/n² = π²(w² - w + 1/6)` for `w ∈ [0, 1]`.
fn cos_series(w: f64) -> f64 {
    let w = w - w.floor();
    PI * PI * (w * w - w + 1.0 / 6.0)
}

/// Compares both sides of the Poisson summation identity for `S₂(·/H)`.
pub fn poisson_check(h: f64, z: f64, n_max: u64) -> Result<PoissonReport> {
    if !(h >= 1.0) || !h.is_finite() {
        return Err(Error::Precondition(format!("H = {h} must be at least 1")));
    }
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be positive".into()));
    }
    let zf = z - z.floor();
    let half = 1.0 / (2.0 * h);
    let c = 6.0 * h * h / (PI * PI);

    // S₂(n/H) = (6H²/π²)(1 - cos(πn/H))/n², symmetric in n
    let mut lhs = Neumaier::default();
    lhs.add(3.0);
    // the same terms with the factor 1 - cos(πn/H) split into three cosines, for the tail
    let mut head = [Neumaier::default(), Neumaier::default(), Neumaier::default()];
    let shifts = [zf, zf + half, zf - half + 1.0];
    for n in 1..=n_max {
        let cz = (std::f64::consts::TAU * frac_mul(n, zf)).cos();
        lhs.add(2.0 * kernel_s2(n as f64 / h) * cz);
        let inv = 1.0 / (n as f64 * n as f64);
        for (acc, &w) in head.iter_mut().zip(&shifts) {
            acc.add((std::f64::consts::TAU * frac_mul(n, w - w.floor())).cos() * inv);
        }
    }
    let lhs = lhs.sum();

    // tail_{n > n_max} of 2c Σ (cos 2πnz - ½cos 2πn(z+1/2H) - ½cos 2πn(z-1/2H))/n²
    let tail_of = |i: usize| cos_series(shifts[i]) - head[i].sum();
    let tail = 2.0 * c * (tail_of(0) - 0.5 * tail_of(1) - 0.5 * tail_of(2));

    let mut rhs = Neumaier::default();
    let mut rhs_terms = 0;
    let k_lo = (zf - half).floor() as i64;
    let k_hi = (zf + half).ceil() as i64;
    for k in k_lo..=k_hi {
        let t = kernel_t(2.0 * (k as f64 - zf) * h);
        if t > 0.0 {
            rhs_terms += 1;
            rhs.add(6.0 * h * t);
        }
    }
    let rhs = rhs.sum();
    Ok(PoissonReport {
        h,
        z,
        n_max,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        tail_bound: 24.0 * h * h / (PI * PI * n_max as f64),
        corrected_residual: (lhs + tail - rhs).abs(),
        rhs_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        assert_eq!(kernel_t(0.0), 1.0);
        assert_eq!(kernel_t(0.25), 0.75);
        assert_eq!(kernel_t(3.0), 0.0);
        assert_eq!(kernel_s(0.0), 1.0);
        assert_eq!(kernel_s2(0.0), 3.0);
        assert!((kernel_s2(1.0) - 12.0 / (PI * PI)).abs() < 1e-15);
        assert!(kernel_s(1.0).abs() < 1e-30);
    }

    #[test]
    fn s2_exceeds_one_on_unit_interval() {
        for i in -1000..=1000 {
            assert!(kernel_s2(i as f64 / 1000.0) > 1.0);
        }
    }

    #[test]
    fn kernel_s_transform_is_t() {
        // midpoint quadrature of ∫ S(x) cos(2πxξ) dx over a long window
        for xi in [0.0, 0.25, 0.5, 0.9, 1.5] {
            let (a, steps) = (400.0, 800_000);
            let dx = 2.0 * a / steps as f64;
            let mut acc = Neumaier::default();
            for i in 0..steps {
                let x = -a + (i as f64 + 0.5) * dx;
                acc.add(kernel_s(x) * (std::f64::consts::TAU * x * xi).cos() * dx);
            }
            assert!((acc.sum() - kernel_t(xi)).abs() < 2e-3, "xi = {xi}");
        }
    }

    #[test]
    fn poisson_within_tail_bound() {
        for h in [2.0, 4.0, 10.0] {
            for z in [0.0, 1.0 / 3.0, 0.5] {
                let r = poisson_check(h, z, 100_000).unwrap();
                assert!(r.within_bound(), "{r:?}");
                assert!(r.corrected_residual < 1e-8, "{r:?}");
                assert!(r.rhs_terms <= h.ceil() as usize + 1);
            }
        }
    }

    #[test]
    fn poisson_h10_z0() {
        let r = poisson_check(10.0, 0.0, 1_000_000).unwrap();
        assert!(r.within_bound());
        assert!(r.corrected_residual <= 1e-6, "{r:?}");
    }

    #[test]
    fn poisson_rejects_small_h() {
        assert!(poisson_check(0.5, 0.0, 10).is_err());
    }
}
