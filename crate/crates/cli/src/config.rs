//! Experiment configuration documents.
//!
//! A config is one TOML file. Every section is optional and falls back to
//! the reference 55-mode fiber with a Haar link. Synthetic matrix specs that
//! omit their own `seed` inherit the top-level one, so `--seed` alone moves
//! an entire experiment to a fresh realization.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use mmfpls::channel::{LinkDocument, MatrixSource, MatrixSpec};
use mmfpls::fiber::FiberSpec;
use mmfpls::rng::Seed;
use mmfpls::security::{MdmThresholds, DEFAULT_BOB_SUCCESS_MIN, DEFAULT_EVE_FAIL_MIN, DEFAULT_TRIALS};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Base seed for Monte-Carlo trials and for synthetic matrices without their own.
    #[serde(default = "default_seed")]
    pub seed: Seed,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Artificial-noise grid, ascending fractions in [0, 1].
    #[serde(default = "default_levels")]
    pub noise_levels: Vec<f64>,
    /// Matrix size for `tm-gen`; defaults to the fiber's mode count.
    #[serde(default)]
    pub dimension: Option<usize>,
    #[serde(default = "FiberSpec::reference")]
    pub fiber: FiberSpec,
    #[serde(default)]
    pub link: LinkDocument,
    #[serde(default)]
    pub secure: SecureSection,
    #[serde(default)]
    pub mdm: MdmSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_seed() -> Seed {
    Seed(1)
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn default_levels() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SecureSection {
    pub noise_level: f64,
    pub eve_fail_min: f64,
    pub bob_success_min: f64,
    /// Existing sweep CSV to classify instead of running a new sweep.
    pub report: Option<PathBuf>,
}

impl Default for SecureSection {
    fn default() -> Self {
        SecureSection {
            noise_level: 0.5,
            eve_fail_min: DEFAULT_EVE_FAIL_MIN,
            bob_success_min: DEFAULT_BOB_SUCCESS_MIN,
            report: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MdmSection {
    /// One-based channel labels.
    pub channels: Vec<usize>,
    /// Which of `channels` carry a 1, as a string like "101"; all by default.
    pub bits: Option<String>,
    /// Overrides the top-level grid for the MDM transcript.
    pub noise_levels: Option<Vec<f64>>,
    pub eve_success_max: f64,
    pub bob_success_min: f64,
}

impl Default for MdmSection {
    fn default() -> Self {
        let t = MdmThresholds::default();
        MdmSection {
            channels: vec![1, 6, 50],
            bits: None,
            noise_levels: None,
            eve_success_max: t.eve_success_max,
            bob_success_min: t.bob_success_min,
        }
    }
}

impl MdmSection {
    pub fn thresholds(&self) -> MdmThresholds {
        MdmThresholds {
            eve_success_max: self.eve_success_max,
            bob_success_min: self.bob_success_min,
        }
    }

    /// Zero-based active channels after applying `bits`.
    pub fn active_channels(&self) -> Result<Vec<usize>> {
        validate_labels(&self.channels)?;
        let zero_based: Vec<usize> = self.channels.iter().map(|c| c - 1).collect();
        let Some(bits) = &self.bits else {
            return Ok(zero_based);
        };
        let bits = parse_bits(bits)?;
        if bits.len() != zero_based.len() {
            bail!("mdm.bits: {} bits given for {} channels", bits.len(), zero_based.len());
        }
        let active: Vec<usize> = zero_based.iter().zip(&bits).filter(|(_, &b)| b).map(|(&c, _)| c).collect();
        if active.is_empty() {
            bail!("mdm.bits: at least one bit must be set");
        }
        Ok(active)
    }
}

fn validate_labels(channels: &[usize]) -> Result<()> {
    if channels.is_empty() {
        bail!("mdm.channels: must not be empty");
    }
    let mut seen = BTreeSet::new();
    for &c in channels {
        if c == 0 {
            bail!("mdm.channels: labels are one-based, got 0");
        }
        if !seen.insert(c) {
            bail!("mdm.channels: channel {c} listed twice");
        }
    }
    Ok(())
}

pub fn parse_bits(text: &str) -> Result<Vec<bool>> {
    text.chars()
        .filter(|c| !matches!(c, ',' | '_' | ' '))
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(anyhow!("mdm.bits: expected 0 or 1, found {other:?}")),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Render Bob and Eve SVG heatmaps next to the sweep CSV.
    pub heatmaps: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            heatmaps: true,
        }
    }
}

/// Command-line values that take precedence over the document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub out: Option<PathBuf>,
}

/// A validated config together with the directory its relative paths resolve against.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub base_dir: PathBuf,
}

const LINK_KEYS: &[&str] = &[
    "t_ab",
    "t_ae",
    "tap",
    "receiver_noise_std",
    "alpha",
    "artificial_noise_level",
    "artificial_noise_reference",
];
const MATRIX_KEYS: &[&str] = &["kind", "seed", "epsilon", "path", "measurement_noise", "measurement_seed"];
const TAP_KEYS: &[&str] = &["kind", "rho", "sigma_sq_min"];
const FIBER_KEYS: &[&str] = &["core_radius", "numerical_aperture", "wavelength", "core_index"];

impl Experiment {
    /// Load from a file, or the built-in defaults when `path` is `None`.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Experiment> {
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
                Experiment::from_toml(&text, &base, overrides).with_context(|| format!("in config {}", p.display()))
            }
            None => Experiment::from_toml("", Path::new("."), overrides),
        }
    }

    pub fn from_toml(text: &str, base_dir: &Path, overrides: &Overrides) -> Result<Experiment> {
        let mut table: toml::Table = text.parse().context("config is not valid TOML")?;
        if let Some(seed) = overrides.seed {
            if seed > i64::MAX as u64 {
                bail!("seed: {seed} exceeds the TOML integer range (at most {})", i64::MAX);
            }
            table.insert("seed".into(), toml::Value::Integer(seed as i64));
        }
        if let Some(trials) = overrides.trials {
            table.insert("trials".into(), toml::Value::Integer(trials as i64));
        }
        check_nested_keys(&table)?;
        let seed = match table.get("seed") {
            Some(v) => v.clone(),
            None => toml::Value::Integer(default_seed().0 as i64),
        };
        inherit_matrix_seeds(&mut table, &seed);

        let config: ExperimentConfig = serde_path_to_error::deserialize(toml::Value::Table(table))
            .map_err(|e| anyhow!("{}: {}", e.path(), e.inner().message().trim()))?;
        let mut config = config;
        if let Some(out) = &overrides.out {
            config.output.dir = out.clone();
        }
        let experiment = Experiment {
            config,
            base_dir: base_dir.to_path_buf(),
        };
        experiment.validate()?;
        Ok(experiment)
    }

    pub fn out_dir(&self) -> &Path {
        &self.config.output.dir
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Everything that can be checked without solving modes or building matrices.
    pub fn validate(&self) -> Result<()> {
        let c = &self.config;
        if c.trials == 0 {
            bail!("trials: must be at least 1");
        }
        validate_grid("noise_levels", &c.noise_levels)?;
        if let Some(levels) = &c.mdm.noise_levels {
            validate_grid("mdm.noise_levels", levels)?;
        }
        if c.dimension == Some(0) {
            bail!("dimension: must be at least 1");
        }
        for (name, spec) in [("link.t_ab", Some(&c.link.t_ab)), ("link.t_ae", c.link.t_ae.as_ref())] {
            let Some(spec) = spec else { continue };
            if let MatrixSource::File { path } = &spec.source {
                let full = self.resolve(path);
                if !full.is_file() {
                    bail!("{name}.path: {} does not exist", full.display());
                }
            }
            validate_matrix_spec(name, spec)?;
        }
        let s = &c.link.settings;
        let n = |v: f64| v.is_finite() && v >= 0.0;
        if !n(s.receiver_noise_std) {
            bail!("link.receiver_noise_std: must be finite and non-negative");
        }
        if !(0.0..=1.0).contains(&s.artificial_noise_level) {
            bail!("link.artificial_noise_level: must lie in [0, 1]");
        }
        if !n(s.artificial_noise_reference) {
            bail!("link.artificial_noise_reference: must be finite and non-negative");
        }
        s.alpha.validate().map_err(|e| anyhow!("link.alpha: {e}"))?;
        let tap = &c.link.tap;
        if !(0.0..1.0).contains(&tap.rho) {
            bail!("link.tap.rho: must lie in [0, 1)");
        }
        if !(tap.sigma_sq_min > 0.0 && tap.sigma_sq_min < 1.0) {
            bail!("link.tap.sigma_sq_min: must lie in (0, 1)");
        }
        for (name, v) in [
            ("secure.eve_fail_min", c.secure.eve_fail_min),
            ("secure.bob_success_min", c.secure.bob_success_min),
            ("mdm.eve_success_max", c.mdm.eve_success_max),
            ("mdm.bob_success_min", c.mdm.bob_success_min),
        ] {
            if !(0.0..=1.0).contains(&v) {
                bail!("{name}: must lie in [0, 1]");
            }
        }
        if let Some(report) = &c.secure.report {
            let full = self.resolve(report);
            if !full.is_file() {
                bail!("secure.report: {} does not exist", full.display());
            }
        } else if !c.noise_levels.iter().any(|l| (l - c.secure.noise_level).abs() <= 1e-12) {
            bail!(
                "secure.noise_level: {} is not in the noise grid; available levels: {}",
                c.secure.noise_level,
                format_levels(&c.noise_levels)
            );
        }
        c.mdm.active_channels()?;
        Ok(())
    }
}

pub fn format_levels(levels: &[f64]) -> String {
    levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ")
}

fn validate_grid(name: &str, levels: &[f64]) -> Result<()> {
    if levels.is_empty() {
        bail!("{name}: must not be empty");
    }
    if let Some(bad) = levels.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        bail!("{name}: level {bad} outside [0, 1]");
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        bail!("{name}: must be strictly ascending");
    }
    Ok(())
}

fn validate_matrix_spec(name: &str, spec: &MatrixSpec) -> Result<()> {
    if !(spec.measurement_noise.is_finite() && spec.measurement_noise >= 0.0) {
        bail!("{name}.measurement_noise: must be finite and non-negative");
    }
    if let MatrixSource::Coupled { epsilon, .. } = spec.source {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            bail!("{name}.epsilon: must be finite and non-negative");
        }
    }
    Ok(())
}

// Flattened and defaulted sections would otherwise drop misspelled keys silently.
fn check_nested_keys(table: &toml::Table) -> Result<()> {
    fn check(value: &toml::Value, name: &str, allowed: &[&str]) -> Result<()> {
        let Some(t) = value.as_table() else { return Ok(()) };
        for key in t.keys() {
            if !allowed.contains(&key.as_str()) {
                bail!("{name}.{key}: unknown field, expected one of {}", allowed.join(", "));
            }
        }
        Ok(())
    }
    if let Some(f) = table.get("fiber") {
        check(f, "fiber", FIBER_KEYS)?;
    }
    if let Some(link) = table.get("link") {
        check(link, "link", LINK_KEYS)?;
        for m in ["t_ab", "t_ae"] {
            if let Some(spec) = link.get(m) {
                check(spec, &format!("link.{m}"), MATRIX_KEYS)?;
            }
        }
        if let Some(tap) = link.get("tap") {
            check(tap, "link.tap", TAP_KEYS)?;
        }
    }
    Ok(())
}

fn inherit_matrix_seeds(table: &mut toml::Table, seed: &toml::Value) {
    let link = table.entry("link").or_insert_with(|| toml::Value::Table(toml::Table::new()));
    let Some(link) = link.as_table_mut() else {
        return;
    };
    link.entry("t_ab").or_insert_with(|| {
        let mut haar = toml::Table::new();
        haar.insert("kind".into(), "haar".into());
        toml::Value::Table(haar)
    });
    for m in ["t_ab", "t_ae"] {
        let Some(spec) = link.get_mut(m).and_then(|v| v.as_table_mut()) else {
            continue;
        };
        let synthetic = matches!(spec.get("kind").and_then(|k| k.as_str()), Some("haar" | "coupled"));
        if synthetic && !spec.contains_key("seed") {
            spec.insert("seed".into(), seed.clone());
        }
    }
}
