//! Command implementations behind the `continuant` binary.
//!
//! Each `cmd_*` writes its artifacts under `RunConfig::out` and returns a
//! one-line summary ending in `input=<sha256>`, the hash of the config with
//! the output and cache directories left out. Outputs depend only on the
//! config, so two runs produce identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{Num, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::{self, sha256_hex, write_atomic, Cache};
use crate::continuant::{cf_value, continuant, word_to_matrix, Alphabet, Rational, Word};
use crate::dedekind;
use crate::dimension::{self, DELTA_1_TO_6_AND_8, DELTA_1_TO_7};
use crate::ensemble::{build_omega, ConstantsMode, Ensemble, Mode};
use crate::error::{Error, Result};
use crate::expsum::{self, NineDomainConfig, Spectrum};
use crate::semigroup::{Emit, EnumerationQuery, Parity};

/// Everything a command reads. `out` and `cache` are not part of the input hash.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub alphabet: Alphabet,
    /// `N` or `x`; accepts integers and forms like `1e9`.
    pub bound: Option<String>,
    pub parity: Option<Parity>,
    pub epsilon0: Option<f64>,
    pub mode: Mode,
    pub overrides: Vec<(String, f64)>,
    pub seed: u64,
    pub grid: Option<Vec<u64>>,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub cache: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(alphabet: Alphabet, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            alphabet,
            bound: None,
            parity: None,
            epsilon0: None,
            mode: Mode::Relaxed,
            overrides: Vec::new(),
            seed: 0,
            grid: None,
            out: out.into(),
            cache: None,
        }
    }

    /// SHA-256 of the command name and the config.
    pub fn input_hash(&self, command: &str) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        sha256_hex(format!("{command}\n{json}").as_bytes())
    }

    fn bound_or(&self, default: u64) -> Result<BigUint> {
        match &self.bound {
            Some(s) => parse_bound(s),
            None => Ok(default.into()),
        }
    }

    fn bound_u64(&self, default: u64) -> Result<u64> {
        let b = self.bound_or(default)?;
        b.to_u64().ok_or_else(|| Error::TooLarge(b.to_string()))
    }

    fn cache(&self) -> Cache {
        Cache::from_env_or(self.cache.clone())
    }

    /// The constants mode with every override applied.
    pub fn constants(&self) -> Result<ConstantsMode> {
        let mut m = match self.mode {
            Mode::Literal => ConstantsMode::literal(alphabet_delta(&self.alphabet)?),
            Mode::Relaxed => ConstantsMode::relaxed(),
        };
        for (k, v) in &self.overrides {
            m = m.with_override(k, *v)?;
        }
        Ok(m)
    }

    fn epsilon0(&self) -> f64 {
        self.epsilon0.unwrap_or(match self.mode {
            Mode::Literal => 1.0 / 3000.0,
            Mode::Relaxed => 0.5,
        })
    }

    fn artifact(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn summary(&self, command: &str, fields: &str) -> String {
        format!("{command} {fields} input={}", self.input_hash(command))
    }
}

/// Parses `12345`, `1e9` or `2.5e3` into an exact integer.
pub fn parse_bound(s: &str) -> Result<BigUint> {
    let s = s.trim().replace('_', "");
    let bad = || Error::Parse(format!("bad bound {s:?}"));
    let Some((mant, exp)) = s.split_once(['e', 'E']) else {
        return BigUint::from_str_radix(&s, 10).map_err(|_| bad());
    };
    let exp: u32 = exp.parse().map_err(|_| bad())?;
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if frac.len() as u32 > exp || int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let m = BigUint::from_str_radix(&digits, 10).map_err(|_| bad())?;
    Ok(m * BigUint::from(10u32).pow(exp - frac.len() as u32))
}

/// Published dimension for `{1..7}` and `{1..6,8}`, otherwise a fit of `F_A`.
pub fn alphabet_delta(alphabet: &Alphabet) -> Result<f64> {
    match alphabet.digits() {
        [1, 2, 3, 4, 5, 6, 7] => Ok(DELTA_1_TO_7),
        [1, 2, 3, 4, 5, 6, 8] => Ok(DELTA_1_TO_6_AND_8),
        _ => {
            let a = alphabet.max_digit() as u64;
            let g = (4 * a * a).max(1000);
            Ok(dimension::estimate_delta(alphabet, &[g, 10 * g, 100 * g])?.delta)
        }
    }
}

/// Default fit grid: `10^3` to `10^5`, five points per decade.
pub fn default_grid() -> Vec<u64> {
    (0..=10).map(|i| 10f64.powf(3.0 + 0.2 * i as f64).round() as u64).collect()
}

/// Process exit code for an error: 2 for bad input, 3 for infeasible parameters.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::InvalidWord { .. }
        | Error::DigitOutsideAlphabet { .. }
        | Error::InvalidAlphabet(_)
        | Error::InvalidInput(_) => 2,
        Error::Io { .. } | Error::Json(_) => 1,
        _ => 3,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

/// Prints the continuant, value and matrix of a word literal such as `2,1,3`.
pub fn cmd_continuant(word: &str) -> Result<String> {
    let w: Word = word.parse()?;
    let value = match cf_value(&w) {
        Ok(v) => v.to_string(),
        Err(Error::UndefinedValue) => "undefined".into(),
        Err(e) => return Err(e),
    };
    Ok(format!(
        "word=({w}) continuant={} value={value} matrix={}",
        continuant(&w),
        word_to_matrix(&w)
    ))
}

/// Words with continuant at most the bound, written to `words.txt`.
pub fn cmd_enumerate(cfg: &RunConfig) -> Result<String> {
    let parity = cfg.parity.unwrap_or(Parity::EvenOnly);
    let q = EnumerationQuery::new(cfg.alphabet.clone(), cfg.bound_or(100)?, parity, Emit::Words);
    let words = cfg.cache().words(&q)?;
    let mut buf = Vec::new();
    cache::write_words(&words, &mut buf).map_err(|e| Error::io(cfg.artifact("words.txt"), e))?;
    write_atomic(&cfg.artifact("words.txt"), &buf)?;
    Ok(cfg.summary("enumerate", &format!("words={} bound={} parity={parity}", words.len(), q.bound)))
}

/// Denominator coverage `#D_A(N)/N`, with the table in `denominators.table`
/// and the gaps in `missing.txt`.
pub fn cmd_density(cfg: &RunConfig) -> Result<String> {
    let parity = cfg.parity.unwrap_or(Parity::Any);
    let n = cfg.bound_u64(1000)?;
    if n == 0 {
        return Err(Error::Precondition("density needs N >= 1".into()));
    }
    let q = EnumerationQuery::new(cfg.alphabet.clone(), n, parity, Emit::Denominators);
    let table = cfg.cache().denominators(&q)?;
    let mut buf = Vec::new();
    cache::write_table(&table, &mut buf).map_err(|e| Error::io(cfg.artifact("denominators.table"), e))?;
    write_atomic(&cfg.artifact("denominators.table"), &buf)?;
    let mut missing = String::new();
    for d in table.missing() {
        writeln!(missing, "{d}").expect("string write");
    }
    write_atomic(&cfg.artifact("missing.txt"), missing.as_bytes())?;
    Ok(cfg.summary("density", &format!("coverage={}/{n} parity={parity}", table.count())))
}

/// Least-squares dimension fit and threshold verdicts, in `dimension.json`.
pub fn cmd_dimension(cfg: &RunConfig) -> Result<String> {
    let grid = cfg.grid.clone().unwrap_or_else(default_grid);
    let report = dimension::dimension_report(&cfg.alphabet, &grid)?;
    write_json(&cfg.artifact("dimension.json"), &report)?;
    let (a, b, c) = report.thresholds.as_tuple();
    Ok(cfg.summary(
        "dimension",
        &format!("delta={:.6} stderr={:.2e} thresholds=({a},{b},{c})", report.delta, report.stderr),
    ))
}

/// One layer of the manifest; members live in a content-addressed word file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LayerEntry {
    pub index: usize,
    pub m: f64,
    pub alpha: f64,
    pub l: u64,
    pub p: u32,
    pub k: usize,
    pub window_divisor: f64,
    pub step_sizes: [usize; 3],
    pub size: usize,
    pub members: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleManifest {
    pub alphabet: Alphabet,
    pub mode: ConstantsMode,
    pub n: String,
    pub epsilon0: f64,
    pub j: Option<i64>,
    pub layers: Vec<LayerEntry>,
}

impl EnsembleManifest {
    /// Rebuilds the layers from the word files next to the manifest.
    pub fn load_layers(&self, members_dir: &Path) -> Result<Ensemble> {
        let mut layers = Vec::new();
        for e in &self.layers {
            let path = members_dir.join(&e.members);
            let text = std::fs::read_to_string(&path).map_err(|err| Error::io(&path, err))?;
            if sha256_hex(text.as_bytes()) + ".words" != e.members {
                return Err(Error::Check(format!("{} does not match its hash", path.display())));
            }
            let words = cache::read_words(text.as_bytes())?.into_iter().map(|(w, _)| w).collect();
            layers.push(crate::ensemble::PreEnsemble::from_members(e.m, e.l, e.p, e.window_divisor, words)?);
        }
        Ok(Ensemble::from_layers(self.alphabet.clone(), layers, self.mode.clone()))
    }
}

fn build_ensemble(cfg: &RunConfig) -> Result<(Ensemble, f64, f64)> {
    let n = cfg.bound_or(1_000_000_000)?;
    let n = n.to_f64().filter(|v| v.is_finite()).ok_or_else(|| Error::TooLarge(n.to_string()))?;
    let eps0 = cfg.epsilon0();
    let om = build_omega(n, eps0, &cfg.alphabet, &cfg.constants()?)?;
    Ok((om, n, eps0))
}

/// Writes each layer's members to `members/<sha256>.words` (and to the cache
/// directory when one is set) and the manifest to `ensemble.json`.
fn write_manifest(cfg: &RunConfig, om: &Ensemble, eps0: f64) -> Result<EnsembleManifest> {
    let cache_dir = cfg.cache().dir().map(Path::to_path_buf);
    let mut entries = Vec::new();
    for layer in &om.layers {
        let xi = &layer.xi;
        let mut text = String::new();
        for (w, norm) in xi.members.iter().zip(xi.norms()) {
            writeln!(text, "{w}\t{norm}").expect("string write");
        }
        let name = format!("{}.words", sha256_hex(text.as_bytes()));
        write_atomic(&cfg.out.join("members").join(&name), text.as_bytes())?;
        if let Some(dir) = &cache_dir {
            write_atomic(&dir.join(&name), text.as_bytes())?;
        }
        entries.push(LayerEntry {
            index: layer.index,
            m: layer.m,
            alpha: layer.alpha,
            l: xi.l,
            p: xi.p,
            k: xi.k,
            window_divisor: xi.window_divisor,
            step_sizes: xi.step_sizes,
            size: xi.len(),
            members: name,
        });
    }
    let manifest = EnsembleManifest {
        alphabet: cfg.alphabet.clone(),
        mode: om.mode.clone(),
        n: cfg.bound_or(1_000_000_000)?.to_string(),
        epsilon0: eps0,
        j: om.schedule.as_ref().map(|s| s.j),
        layers: entries,
    };
    write_json(&cfg.artifact("ensemble.json"), &manifest)?;
    Ok(manifest)
}

/// Builds `Ω_N`, runs the structural checks and writes the manifest and
/// `structure.json`.
pub fn cmd_ensemble(cfg: &RunConfig) -> Result<String> {
    let (om, _, eps0) = build_ensemble(cfg)?;
    write_manifest(cfg, &om, eps0)?;
    let report = om.structure_report()?;
    write_json(&cfg.artifact("structure.json"), &report)?;
    let sizes: Vec<String> = report.layer_sizes.iter().map(usize::to_string).collect();
    Ok(cfg.summary(
        "ensemble",
        &format!(
            "layers={} sizes={} total={} checks={}",
            sizes.len(),
            sizes.join(","),
            report.total,
            if report.all_ok() { "ok" } else { "failed" }
        ),
    ))
}

/// Norm spectrum of `Ω_N` (`spectrum.csv`) and the per-domain arc report (`arcs.json`).
pub fn cmd_expsum(cfg: &RunConfig) -> Result<String> {
    let (om, n, eps0) = build_ensemble(cfg)?;
    write_manifest(cfg, &om, eps0)?;
    let spec = Spectrum::from_ensemble(&om)?;
    let mut buf = Vec::new();
    spec.write_csv(&mut buf).map_err(|e| Error::io(cfg.artifact("spectrum.csv"), e))?;
    write_atomic(&cfg.artifact("spectrum.csv"), &buf)?;
    let n_int = (n.round() as u64).max(spec.max_norm());
    let report = expsum::nine_domain_report(
        &spec,
        &NineDomainConfig {
            n: n_int,
            delta: alphabet_delta(&cfg.alphabet)?,
            eps0,
            q0: 1.0,
            seed: cfg.seed,
            samples_per_domain: 32,
        },
    )?;
    write_json(&cfg.artifact("arcs.json"), &report)?;
    Ok(cfg.summary(
        "expsum",
        &format!(
            "total={} support={} parseval={} R={:.6e} non_equidistributed={}",
            report.total, report.support, report.parseval, report.r, report.non_equidistributed
        ),
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct DedekindSummary {
    pub sawtooth_checked: u64,
    pub sawtooth_failures: u64,
    pub symmetry_checked: u64,
    pub symmetry_failures: u64,
    pub max_reduction_remainder: String,
    pub reduction_failures: u64,
    pub constant: String,
    pub bound_rows: usize,
    pub min_slack: String,
    pub bound_failures: u64,
    pub knuth_yao_max_b: u64,
    pub knuth_yao_max_ratio: f64,
    pub knuth_yao_failures: u64,
    pub failures: u64,
}

/// Sawtooth distribution identity for `q <= max_q`, exact.
pub fn sawtooth_sweep(max_q: i64) -> (u64, u64) {
    (1..=max_q)
        .into_par_iter()
        .map(|q| {
            let (mut checked, mut failed) = (0u64, 0u64);
            for p in (1..=q).filter(|p| p.gcd(&q) == 1) {
                for j in 0..60 {
                    let x = Rational::new(j.into(), 60.into());
                    let rhs = dedekind::rho(&(&x * Rational::from_integer(q.into())));
                    checked += 1;
                    if dedekind::sawtooth_sum(p, q, &x).ok() != Some(rhs) {
                        failed += 1;
                    }
                }
            }
            (checked, failed)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// `V(z) = V(-z)` for `P₂ <= max_p2`, all valid `c`, `|z| <= P₂`.
pub fn symmetry_sweep(max_p2: i64) -> (u64, u64) {
    (1..=max_p2)
        .into_par_iter()
        .map(|p2| {
            let (mut checked, mut failed) = (0u64, 0u64);
            for c in dedekind::valid_c(p2) {
                for z in 0..=p2 {
                    checked += 1;
                    if dedekind::v_sum(p2, c, z).ok() != dedekind::v_sum(p2, c, -z).ok() {
                        failed += 1;
                    }
                }
            }
            (checked, failed)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// The Dedekind identity sweep; rows of the bound sweep go to `dedekind.csv`.
/// The bound sets the largest `q` of the sawtooth identity (default 50).
pub fn cmd_dedekind(cfg: &RunConfig) -> Result<String> {
    let max_q = cfg.bound_u64(50)? as i64;
    let (sawtooth_checked, sawtooth_failures) = sawtooth_sweep(max_q);
    let (symmetry_checked, symmetry_failures) = symmetry_sweep(40);
    let remainder = dedekind::max_reduction_remainder(40);
    let reduction_failures = u64::from(remainder > Rational::from_integer(1.into()));

    let constant = dedekind::frozen_constant();
    let rows = dedekind::BoundSweep::validation().run(&constant);
    let min_slack = rows.iter().map(|r| r.slack.clone()).min().unwrap_or_else(Rational::zero);
    let bound_failures = rows.iter().filter(|r| r.slack < Rational::zero()).count() as u64;
    let mut buf = Vec::new();
    dedekind::write_bound_csv(&rows, &mut buf).map_err(|e| Error::io(cfg.artifact("dedekind.csv"), e))?;
    write_atomic(&cfg.artifact("dedekind.csv"), &buf)?;

    let (ky_b, ky_ratio) = dedekind::max_knuth_yao_ratio(10_000);
    let knuth_yao_failures = u64::from(ky_ratio > 10.0);
    let failures = sawtooth_failures + symmetry_failures + reduction_failures + bound_failures + knuth_yao_failures;
    let summary = DedekindSummary {
        sawtooth_checked,
        sawtooth_failures,
        symmetry_checked,
        symmetry_failures,
        max_reduction_remainder: remainder.to_string(),
        reduction_failures,
        constant: constant.to_string(),
        bound_rows: rows.len(),
        min_slack: min_slack.to_string(),
        bound_failures,
        knuth_yao_max_b: ky_b,
        knuth_yao_max_ratio: ky_ratio,
        knuth_yao_failures,
        failures,
    };
    write_json(&cfg.artifact("dedekind.json"), &summary)?;
    Ok(cfg.summary(
        "dedekind",
        &format!(
            "failures={failures} checked={} max_remainder={remainder} min_slack={min_slack}",
            sawtooth_checked + symmetry_checked + rows.len() as u64
        ),
    ))
}
