//! Pre-ensembles `Ξ(M)`, the parameter schedule `N_j` and the layered
//! ensemble `Ω_N = Ξ_1 Ξ_2 … Ξ_{2J+1}`.
//!
//! Every constant of the construction is available in two modes. `Literal`
//! uses the exact constants and asserts every inequality; at any size that
//! fits on a desk it fails early with a precondition or size error, so it is
//! mostly useful for dry runs of the schedule. `Relaxed` lets named
//! constants be overridden (each override is logged) and measures what
//! literal mode would assert.

mod omega;
mod schedule;
mod xi;

pub use omega::{build_omega, Ensemble, EnsembleSplit, Layer, NormRange, StructureReport};
pub use schedule::{schedule, Schedule, ScheduleCheck};
pub use xi::{build_xi, fibonacci_index, golden_ratio_check, GoldenReport, PreEnsemble};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Literal,
    Relaxed,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(Mode::Literal),
            "relaxed" => Ok(Mode::Relaxed),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Literal => "literal",
            Mode::Relaxed => "relaxed",
        })
    }
}

/// Names accepted by [`ConstantsMode::with_override`].
///
/// * `p`: number of leading and trailing ones (0 disables the filter)
/// * `J`: half the number of layers minus one half; layers = `2J+1`
/// * `window_divisor`: the divisor `64A²` of the lower norm window
pub const OVERRIDE_KEYS: [&str; 3] = ["p", "J", "window_divisor"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsMode {
    pub mode: Mode,
    overrides: BTreeMap<String, f64>,
    /// Dimension used by literal-mode size assertions.
    pub trusted_delta: Option<f64>,
}

impl ConstantsMode {
    pub fn literal(trusted_delta: f64) -> Self {
        ConstantsMode {
            mode: Mode::Literal,
            overrides: BTreeMap::new(),
            trusted_delta: Some(trusted_delta),
        }
    }

    pub fn relaxed() -> Self {
        ConstantsMode {
            mode: Mode::Relaxed,
            overrides: BTreeMap::new(),
            trusted_delta: None,
        }
    }

    pub fn is_literal(&self) -> bool {
        self.mode == Mode::Literal
    }

    pub fn with_override(mut self, key: &str, value: f64) -> Result<Self> {
        if self.is_literal() {
            return Err(Error::Parse(format!("override {key} is not allowed in literal mode")));
        }
        if !OVERRIDE_KEYS.contains(&key) {
            return Err(Error::Parse(format!(
                "unknown override {key:?} (known: {})",
                OVERRIDE_KEYS.join(", ")
            )));
        }
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Parse(format!("override {key} must be a nonnegative number")));
        }
        if matches!(key, "p" | "J") && value.fract() != 0.0 {
            return Err(Error::Parse(format!("override {key} must be an integer")));
        }
        log::info!("relaxed constant {key} := {value}");
        self.overrides.insert(key.to_string(), value);
        Ok(self)
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.overrides.get(key).copied()
    }

    pub fn overrides(&self) -> &BTreeMap<String, f64> {
        &self.overrides
    }

    /// Divisor of the lower end of the norm window.
    pub(crate) fn window_divisor(&self, a: u32) -> f64 {
        self.get("window_divisor").unwrap_or(64.0 * (a as f64).powi(2))
    }

    fn check_epsilon(&self, eps0: f64) -> Result<()> {
        let max = match self.mode {
            Mode::Literal => 1.0 / 2500.0,
            Mode::Relaxed => 0.5,
        };
        let ok = eps0 > 0.0 && (eps0 < max || (self.mode == Mode::Relaxed && eps0 == max));
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!("epsilon0 = {eps0} is outside the {} range", self.mode)))
        }
    }
}

/// `φ^{-2} = (3 - √5)/2`.
pub(crate) fn inv_golden_sq() -> f64 {
    (3.0 - 5f64.sqrt()) / 2.0
}
