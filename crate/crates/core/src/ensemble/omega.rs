use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::xi::{mat_mul, word_matrix, M2, IDENTITY};
use super::{build_xi, golden_ratio_check, inv_golden_sq, ConstantsMode, GoldenReport, PreEnsemble, Schedule};
use crate::continuant::{Alphabet, Word};
use crate::error::{Error, Result};

/// Largest ensemble that structural checks will enumerate.
pub const ENUMERATION_LIMIT: u128 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// 1-based position in the product.
    pub index: usize,
    pub m: f64,
    /// `L_j / M_j`
    pub alpha: f64,
    pub xi: PreEnsemble,
}

/// `Ω = Ξ_1 Ξ_2 … Ξ_n`: all products with one factor from each layer.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub schedule: Option<Schedule>,
    pub mode: ConstantsMode,
    pub alphabet: Alphabet,
    pub layers: Vec<Layer>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRange {
    pub min: u128,
    pub max: u128,
}

impl NormRange {
    fn empty() -> Self {
        NormRange { min: u128::MAX, max: 0 }
    }

    fn add(&mut self, v: u128) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
    }

    fn merge(a: Self, b: Self) -> Self {
        NormRange {
            min: a.min.min(b.min),
            max: a.max.max(b.max),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureReport {
    pub layer_sizes: Vec<usize>,
    pub total: u128,
    pub distinct_products: u128,
    pub unique_expansion: bool,
    pub ones_padding: bool,
    pub fixed_length: bool,
    pub shell_membership: bool,
    /// `∏⟨ξ_i⟩ <= ‖product‖ <= 2^{n-1} ∏⟨ξ_i⟩` for every product.
    pub multiplicativity: bool,
    pub golden: Vec<GoldenReport>,
    pub golden_ok: bool,
    pub product_norms: NormRange,
    /// Literal mode only: `N/(70A²) <= ‖product‖ <= 1.01N` and the size bounds on `#Ω`.
    pub literal_windows: Option<bool>,
}

impl StructureReport {
    pub fn all_ok(&self) -> bool {
        self.unique_expansion
            && self.ones_padding
            && self.fixed_length
            && self.shell_membership
            && self.multiplicativity
            && self.golden_ok
            && self.literal_windows.unwrap_or(true)
    }
}

/// `Ω = Ω^{(1)} Ω^{(2)} = Ω^{(4)} Ω^{(3)}` at a given `M`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleSplit {
    pub m: f64,
    /// `Ω^{(1)} = Ξ_1 … Ξ_{j̄}`
    pub j_bar: usize,
    /// `Ω^{(3)} = Ξ_{h̄+1} … Ξ_{2J+1}`, `h̄ = 2J - j̄ + 1`
    pub h_bar: usize,
    /// `1.03 M^{1+2ε}`
    pub h1: f64,
    /// `80 A^{2.1} M^{1+2ε}`
    pub h3: f64,
    pub gamma1: NormRange,
    pub gamma3: NormRange,
    /// `M/(70A²) <= ‖γ₁‖ <= H1` and `M/(150A²) <= ‖γ₃‖ <= H3`, asserted in literal mode.
    pub gamma1_in_window: bool,
    pub gamma3_in_window: bool,
    pub reconstruction_ok: bool,
}

/// Builds `Ξ_1, …, Ξ_{2J+1}` left to right,
/// `M_1 = N_{1-J}`, `M_{j+1} = N_{j+1-J} / ((1+φ^{-2}) α_j N_{j-J})`.
pub fn build_omega(n: f64, eps0: f64, alphabet: &Alphabet, mode: &ConstantsMode) -> Result<Ensemble> {
    let schedule = Schedule::from_ln(n.ln(), eps0, mode, Some(alphabet.max_digit()))?;
    let jj = schedule.j;
    let mut m = schedule.at(1 - jj);
    let mut layers = Vec::with_capacity(schedule.layers());
    let w = mode.window_divisor(alphabet.max_digit());
    for j in 1..=schedule.layers() as i64 {
        let xi = build_xi(m, alphabet, mode).map_err(|e| Error::Layer {
            layer: j as usize,
            source: Box::new(e),
        })?;
        let alpha = xi.l as f64 / m;
        if !(alpha >= 1.0 / w - 1e-12 && alpha <= 1.0) {
            return Err(Error::Check(format!("layer {j}: alpha = {alpha} outside [1/{w}, 1]")));
        }
        log::debug!("layer {j}: M = {m:.6e}, L = {}, p = {}, k = {}, |Xi| = {}", xi.l, xi.p, xi.k, xi.len());
        layers.push(Layer {
            index: j as usize,
            m,
            alpha,
            xi,
        });
        if j < schedule.layers() as i64 {
            let ratio = (schedule.ln_at(j + 1 - jj) - schedule.ln_at(j - jj)).exp();
            m = ratio / ((1.0 + inv_golden_sq()) * alpha);
        }
    }
    Ok(Ensemble {
        schedule: Some(schedule),
        mode: mode.clone(),
        alphabet: alphabet.clone(),
        layers,
    })
}

impl Ensemble {
    /// An ensemble from explicit layers, without a schedule.
    pub fn from_layers(alphabet: Alphabet, layers: Vec<PreEnsemble>, mode: ConstantsMode) -> Self {
        let layers = layers
            .into_iter()
            .enumerate()
            .map(|(i, xi)| Layer {
                index: i + 1,
                m: xi.m,
                alpha: xi.l as f64 / xi.m,
                xi,
            })
            .collect();
        Ensemble {
            schedule: None,
            mode,
            alphabet,
            layers,
        }
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.xi.len()).collect()
    }

    /// `#Ω` as the product of the layer sizes (saturating).
    pub fn size(&self) -> u128 {
        self.layers.iter().fold(1u128, |acc, l| acc.saturating_mul(l.xi.len() as u128))
    }

    fn size_of(&self, range: std::ops::Range<usize>) -> u128 {
        self.layers[range].iter().fold(1u128, |acc, l| acc.saturating_mul(l.xi.len() as u128))
    }

    fn ensure_enumerable(&self, range: std::ops::Range<usize>) -> Result<u128> {
        let n = self.size_of(range);
        if n > ENUMERATION_LIMIT {
            return Err(Error::TooLarge(format!("{n} products")));
        }
        Ok(n)
    }

    /// The factor tuple with mixed-radix index `idx` over `range` (last layer fastest).
    fn tuple_at(&self, range: std::ops::Range<usize>, mut idx: u128) -> Vec<usize> {
        let mut t = vec![0; range.len()];
        for (slot, layer) in t.iter_mut().zip(&self.layers[range]).rev() {
            let n = layer.xi.len() as u128;
            *slot = (idx % n) as usize;
            idx /= n;
        }
        t
    }

    /// All factor tuples in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let n = self.size();
        let all = 0..self.layers.len();
        (0..n).map(move |i| self.tuple_at(all.clone(), i))
    }

    fn product_over(&self, start: usize, tuple: &[usize]) -> Result<M2> {
        let mut acc = IDENTITY;
        for (layer, &i) in self.layers[start..].iter().zip(tuple) {
            acc = mat_mul(&acc, &layer.xi.matrix(i)).ok_or_else(|| Error::TooLarge("product matrix".into()))?;
        }
        Ok(acc)
    }

    /// Product matrix `ξ_1 ⋯ ξ_n` of a factor tuple.
    pub fn product(&self, tuple: &[usize]) -> Result<[u128; 4]> {
        self.product_over(0, tuple)
    }

    /// Concatenated word of a factor tuple.
    pub fn word(&self, tuple: &[usize]) -> Word {
        let mut digits = Vec::new();
        for (layer, &i) in self.layers.iter().zip(tuple) {
            digits.extend_from_slice(layer.xi.members[i].digits());
        }
        Word::from_raw(digits)
    }

    /// `‖γ‖` for every element, in tuple order.
    pub fn product_norms(&self) -> Result<Vec<u128>> {
        let n = self.ensure_enumerable(0..self.layers.len())?;
        let all = 0..self.layers.len();
        (0..n)
            .into_par_iter()
            .map(|i| self.product(&self.tuple_at(all.clone(), i)).map(|m| m[3]))
            .collect()
    }

    /// Exhaustive structural checks over every element.
    pub fn structure_report(&self) -> Result<StructureReport> {
        let layers_n = self.layers.len();
        let total = self.ensure_enumerable(0..layers_n)?;

        let mut ones_padding = true;
        let mut fixed_length = true;
        let mut shell_membership = true;
        let mut golden = Vec::new();
        let mut golden_ok = true;
        for layer in &self.layers {
            let xi = &layer.xi;
            let p = xi.p as usize;
            let floor = xi.shell_floor();
            for (w, norm) in xi.members.iter().zip(xi.norms()) {
                let d = w.digits();
                fixed_length &= d.len() == xi.k;
                ones_padding &= d.len() >= p && d[..p].iter().all(|&x| x == 1) && d[d.len() - p..].iter().all(|&x| x == 1);
                shell_membership &= norm <= xi.l && norm as f64 >= floor;
            }
            let g = golden_ratio_check(xi, &self.mode)?;
            golden_ok &= g.within_mechanism && g.within_log_bound.unwrap_or(true);
            golden.push(g);
        }

        let all = 0..layers_n;
        let scale = 1u128 << (layers_n.saturating_sub(1));
        let (seen, multiplicativity, range) = (0..total)
            .into_par_iter()
            .try_fold(
                || (HashSet::new(), true, NormRange::empty()),
                |(mut seen, mut mult, mut range), i| -> Result<_> {
                    let t = self.tuple_at(all.clone(), i);
                    let prod = self.product(&t)?;
                    let factors: u128 = self
                        .layers
                        .iter()
                        .zip(&t)
                        .map(|(l, &j)| l.xi.matrix(j)[3])
                        .product();
                    let norm = prod.iter().copied().max().unwrap_or(0);
                    mult &= factors <= norm && norm <= scale * factors;
                    range.add(norm);
                    seen.insert(prod);
                    Ok((seen, mult, range))
                },
            )
            .try_reduce(
                || (HashSet::new(), true, NormRange::empty()),
                |(mut a, ma, ra), (b, mb, rb)| {
                    if a.len() < b.len() {
                        return Ok((b.into_iter().chain(a).collect(), ma && mb, NormRange::merge(ra, rb)));
                    }
                    a.extend(b);
                    Ok((a, ma && mb, NormRange::merge(ra, rb)))
                },
            )?;
        let distinct = seen.len() as u128;

        let literal_windows = if self.mode.is_literal() {
            let s = self
                .schedule
                .as_ref()
                .ok_or_else(|| Error::Precondition("literal windows need a schedule".into()))?;
            let n = s.at(s.j + 1);
            let a2 = (self.alphabet.max_digit() as f64).powi(2);
            let norms_ok = range.min as f64 >= n / (70.0 * a2) && range.max as f64 <= 1.01 * n;
            let delta = self.mode.trusted_delta.unwrap_or(1.0);
            let t = total as f64;
            let size_ok = t >= n.powf(2.0 * delta - s.eps0) && t <= 9.0 * n.powf(2.0 * delta);
            Some(norms_ok && size_ok)
        } else {
            None
        };

        Ok(StructureReport {
            layer_sizes: self.layer_sizes(),
            total,
            distinct_products: distinct,
            unique_expansion: distinct == total,
            ones_padding,
            fixed_length,
            shell_membership,
            multiplicativity,
            golden,
            golden_ok,
            product_norms: range,
            literal_windows,
        })
    }

    fn norm_range_over(&self, range: std::ops::Range<usize>) -> Result<NormRange> {
        let n = self.ensure_enumerable(range.clone())?;
        let start = range.start;
        (0..n)
            .into_par_iter()
            .try_fold(NormRange::empty, |mut acc, i| {
                let m = self.product_over(start, &self.tuple_at(range.clone(), i))?;
                acc.add(m.iter().copied().max().unwrap_or(0));
                Ok(acc)
            })
            .try_reduce(NormRange::empty, |a, b| Ok(NormRange::merge(a, b)))
    }

    /// Splits at `M`: `j̄` is the smallest index with `N_{j̄-J}^{1-ε} <= M <= N_{j̄-J}`.
    pub fn split(&self, m: f64) -> Result<EnsembleSplit> {
        let s = self
            .schedule
            .as_ref()
            .ok_or_else(|| Error::Precondition("split needs a schedule".into()))?;
        let jj = s.j;
        let range = if self.mode.is_literal() { 2..=2 * jj } else { 1..=2 * jj };
        let j_bar = s.split_index(m.ln(), range).ok_or(Error::NoSplit(m))? as usize;
        let h_bar = 2 * jj as usize - j_bar + 1;
        let e = s.eps0;
        let af = self.alphabet.max_digit() as f64;
        let h1 = 1.03 * m.powf(1.0 + 2.0 * e);
        let h3 = 80.0 * af.powf(2.1) * m.powf(1.0 + 2.0 * e);
        let layers_n = self.layers.len();
        let gamma1 = self.norm_range_over(0..j_bar)?;
        let gamma3 = self.norm_range_over(h_bar..layers_n)?;
        let gamma1_in_window = gamma1.min as f64 >= m / (70.0 * af * af) && gamma1.max as f64 <= h1;
        let gamma3_in_window = gamma3.min as f64 >= m / (150.0 * af * af) && gamma3.max as f64 <= h3;
        if self.mode.is_literal() && !(gamma1_in_window && gamma3_in_window) {
            return Err(Error::Check(format!("split windows violated at M = {m}")));
        }

        // left × right against the matrix of the concatenated word
        let total = self.ensure_enumerable(0..layers_n)?;
        let all = 0..layers_n;
        let reconstruction_ok = (0..total).into_par_iter().try_fold(
            || true,
            |ok, i| -> Result<bool> {
                let t = self.tuple_at(all.clone(), i);
                let full = word_matrix(self.word(&t).digits());
                let mut ok = ok;
                for cut in [j_bar, h_bar] {
                    let left = self.product_over(0, &t[..cut])?;
                    let right = self.product_over(cut, &t[cut..])?;
                    ok &= mat_mul(&left, &right) == Some(full);
                }
                Ok(ok)
            },
        )
        .try_reduce(|| true, |a, b| Ok(a && b))?;

        Ok(EnsembleSplit {
            m,
            j_bar,
            h_bar,
            h1,
            h3,
            gamma1,
            gamma3,
            gamma1_in_window,
            gamma3_in_window,
            reconstruction_ok,
        })
    }
}
