//! The Alice → Bob / Eve link.
//!
//! Alice precodes with the regularized inverse of `T_AB`, optionally adding
//! artificial noise before the inversion. Bob sees `T_AB·x_p + n_B` directly.
//! Eve taps the fiber through the diagonal mode-dependent loss `V`, sees
//! `√V·T_AE·x_p + n_E` and equalizes with the regularized inverse of
//! `H = √V·T_AE·T†_AB`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiber::{edge_power_fraction, ModeBasis};
use crate::linalg::{
    coupled_unitary, emulate_measurement, haar_unitary, load_matrix, precoding_divisor, svd, tikhonov_inverse,
    AlphaRule, ComplexMatrix,
};
use crate::rng::{complex_gaussian, Seed};

pub const DEFAULT_EDGE_RHO: f64 = 0.8;
pub const DEFAULT_SIGMA_SQ_MIN: f64 = 0.0028;
pub const DEFAULT_RECEIVER_NOISE: f64 = 0.01;
pub const DEFAULT_NOISE_REFERENCE: f64 = 0.3;

/// How a [`TapProfile`] was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TapSource {
    /// Affine map of per-mode edge power fractions.
    EdgePower { edge_fractions: Vec<f64> },
    /// No mode-dependent loss.
    Identity,
}

/// Diagonal of Eve's mode-dependent power coupling `V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TapProfile {
    pub sigma_sq: Vec<f64>,
    pub rho: f64,
    pub sigma_sq_min: f64,
    pub source: TapSource,
    /// Set when all edge fractions coincide and the map had to fall back to V = I.
    pub degenerate: bool,
}

impl TapProfile {
    pub fn identity(n: usize) -> Self {
        TapProfile {
            sigma_sq: vec![1.0; n],
            rho: DEFAULT_EDGE_RHO,
            sigma_sq_min: 1.0,
            source: TapSource::Identity,
            degenerate: false,
        }
    }

    /// `σ_i² = σ²_min + (f_i − f_min)·(1 − σ²_min)/(f_max − f_min)`.
    pub fn from_edge_fractions(fractions: &[f64], rho: f64, sigma_sq_min: f64) -> Result<Self> {
        if fractions.is_empty() {
            return Err(Error::param("fractions", "at least one mode is required"));
        }
        if !(sigma_sq_min > 0.0 && sigma_sq_min < 1.0) {
            return Err(Error::param("sigma_sq_min", format!("must lie in (0, 1), got {sigma_sq_min}")));
        }
        if let Some(bad) = fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
            return Err(Error::param("fractions", format!("edge fraction {bad} outside [0, 1]")));
        }
        let f_min = fractions.iter().copied().fold(f64::INFINITY, f64::min);
        let f_max = fractions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let source = TapSource::EdgePower {
            edge_fractions: fractions.to_vec(),
        };
        if f_max == f_min {
            log::warn!("all {} edge fractions equal {f_min}; tap falls back to V = I", fractions.len());
            return Ok(TapProfile {
                sigma_sq: vec![1.0; fractions.len()],
                rho,
                sigma_sq_min,
                source,
                degenerate: true,
            });
        }
        let span = f_max - f_min;
        let sigma_sq = fractions
            .iter()
            .map(|&f| {
                if f == f_max {
                    1.0
                } else {
                    sigma_sq_min + (f - f_min) / span * (1.0 - sigma_sq_min)
                }
            })
            .collect();
        Ok(TapProfile {
            sigma_sq,
            rho,
            sigma_sq_min,
            source,
            degenerate: false,
        })
    }

    pub fn len(&self) -> usize {
        self.sigma_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma_sq.is_empty()
    }

    /// Per-mode amplitude factors σ_i.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.sigma_sq.iter().map(|s| s.sqrt()).collect()
    }
}

pub fn build_tap_matrix(basis: &ModeBasis, rho: f64, sigma_sq_min: f64) -> Result<TapProfile> {
    if basis.is_empty() {
        return Err(Error::param("basis", "mode basis is empty"));
    }
    let fractions = basis
        .modes
        .iter()
        .map(|m| edge_power_fraction(m, &basis.fiber, rho))
        .collect::<Result<Vec<_>>>()?;
    TapProfile::from_edge_fractions(&fractions, rho, sigma_sq_min)
}

/// Artificial noise amplitude.
///
/// The RMS modulus of each entry of ñ is `level · reference · a`, where `a`
/// is the amplitude of one active message entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArtificialNoise {
    pub level: f64,
    pub reference: f64,
}

impl ArtificialNoise {
    pub const OFF: ArtificialNoise = ArtificialNoise {
        level: 0.0,
        reference: DEFAULT_NOISE_REFERENCE,
    };

    pub fn new(level: f64) -> Self {
        ArtificialNoise {
            level,
            reference: DEFAULT_NOISE_REFERENCE,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.level) {
            return Err(Error::param("artificial_noise_level", format!("must lie in [0, 1], got {}", self.level)));
        }
        if !(self.reference.is_finite() && self.reference > 0.0) {
            return Err(Error::param("artificial_noise_reference", "must be positive"));
        }
        Ok(())
    }

    /// Draw ñ for message `x`.
    pub fn draw(&self, x: &[Complex64], seed: Seed) -> Vec<Complex64> {
        let active = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let rms = self.level * self.reference * active;
        if rms == 0.0 {
            return vec![Complex64::new(0.0, 0.0); x.len()];
        }
        let mut rng = seed.rng();
        let std = rms * std::f64::consts::FRAC_1_SQRT_2;
        (0..x.len()).map(|_| complex_gaussian(&mut rng, std)).collect()
    }
}

fn precode_with(t_inv: &ComplexMatrix, divisor: f64, x: &[Complex64], noise: ArtificialNoise, seed: Seed) -> Result<Vec<Complex64>> {
    noise.validate()?;
    let n_tilde = noise.draw(x, seed);
    let x_an: Vec<Complex64> = x.iter().zip(&n_tilde).map(|(a, b)| a + b).collect();
    Ok(t_inv.apply(&x_an)?.into_iter().map(|z| z / divisor).collect())
}

/// `T†_AB·(x + ñ) / √tr(T†_AB·T†_AB^H)`.
pub fn precode(t_ab: &ComplexMatrix, x: &[Complex64], noise: ArtificialNoise, alpha: AlphaRule, seed: Seed) -> Result<Vec<Complex64>> {
    let t_inv = tikhonov_inverse(t_ab, alpha)?;
    let divisor = precoding_divisor(&t_inv)?;
    precode_with(&t_inv, divisor, x, noise, seed)
}

fn add_noise(y: &mut [Complex64], std: f64, seed: Seed) {
    if std == 0.0 {
        return;
    }
    let mut rng = seed.rng();
    for z in y.iter_mut() {
        *z += complex_gaussian(&mut rng, std);
    }
}

/// `y_B = T_AB·x_p + n_B` with per-component noise std `noise_std`.
pub fn transmit_bob(t_ab: &ComplexMatrix, x_precoded: &[Complex64], noise_std: f64, seed: Seed) -> Result<Vec<Complex64>> {
    let mut y = t_ab.apply(x_precoded)?;
    add_noise(&mut y, noise_std, seed);
    Ok(y)
}

/// `y_E = √V·T_AE·x_p + n_E`.
pub fn transmit_eve(
    t_ae: &ComplexMatrix,
    tap: &TapProfile,
    x_precoded: &[Complex64],
    noise_std: f64,
    seed: Seed,
) -> Result<Vec<Complex64>> {
    if tap.len() != t_ae.rows() {
        return Err(Error::DimensionMismatch(format!(
            "tap has {} entries for a {}-row channel",
            tap.len(),
            t_ae.rows()
        )));
    }
    let mut y = t_ae.apply(x_precoded)?;
    for (z, s) in y.iter_mut().zip(tap.amplitudes()) {
        *z *= s;
    }
    add_noise(&mut y, noise_std, seed);
    Ok(y)
}

/// `ỹ_E = H†·y_E` with `H = √V·T_AE·T†_AB`.
pub fn eve_equalize(link: &LinkConfig, y_e: &[Complex64]) -> Result<Vec<Complex64>> {
    link.matrices.h_inv.apply(y_e)
}

/// Scalar link parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkSettings {
    /// Receiver noise std per complex component, relative to the amplitude
    /// at which Bob receives one unit-amplitude message entry. The same
    /// absolute noise is applied at Bob and at Eve.
    pub receiver_noise_std: f64,
    pub alpha: AlphaRule,
    pub artificial_noise_level: f64,
    pub artificial_noise_reference: f64,
}

impl Default for LinkSettings {
    fn default() -> Self {
        LinkSettings {
            receiver_noise_std: DEFAULT_RECEIVER_NOISE,
            alpha: AlphaRule::DEFAULT,
            artificial_noise_level: 0.0,
            artificial_noise_reference: DEFAULT_NOISE_REFERENCE,
        }
    }
}

impl LinkSettings {
    pub fn artificial_noise(&self) -> ArtificialNoise {
        ArtificialNoise {
            level: self.artificial_noise_level,
            reference: self.artificial_noise_reference,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.receiver_noise_std.is_finite() && self.receiver_noise_std >= 0.0) {
            return Err(Error::param("receiver_noise_std", "must be finite and non-negative"));
        }
        self.alpha.validate()?;
        self.artificial_noise().validate()
    }
}

#[derive(Debug)]
struct LinkMatrices {
    t_ab: ComplexMatrix,
    t_ae: ComplexMatrix,
    tap: TapProfile,
    t_ab_inv: ComplexMatrix,
    divisor: f64,
    h: ComplexMatrix,
    h_inv: ComplexMatrix,
    bob_gain: f64,
}

/// A fully assembled link. Derived matrices are computed once and shared
/// between clones, so per-noise-level variants are cheap.
#[derive(Debug, Clone)]
pub struct LinkConfig {
    matrices: Arc<LinkMatrices>,
    settings: LinkSettings,
}

impl LinkConfig {
    pub fn new(t_ab: ComplexMatrix, t_ae: ComplexMatrix, tap: TapProfile, settings: LinkSettings) -> Result<Self> {
        settings.validate()?;
        let n = t_ab.rows();
        for (name, m) in [("t_ab", &t_ab), ("t_ae", &t_ae)] {
            if !m.is_square() || m.rows() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        if tap.len() != n {
            return Err(Error::DimensionMismatch(format!("tap has {} entries, link has {n} modes", tap.len())));
        }
        let t_ab_inv = tikhonov_inverse(&t_ab, settings.alpha)?;
        let divisor = precoding_divisor(&t_ab_inv)?;
        let h = t_ae.scale_rows(&tap.amplitudes())?.matmul(&t_ab_inv)?;
        let h_inv = tikhonov_inverse(&h, settings.alpha)?;
        let chain = t_ab.matmul(&t_ab_inv)?;
        let bob_gain = chain.diagonal().iter().map(|z| z.norm()).sum::<f64>() / n as f64 / divisor;
        Ok(LinkConfig {
            matrices: Arc::new(LinkMatrices {
                t_ab,
                t_ae,
                tap,
                t_ab_inv,
                divisor,
                h,
                h_inv,
                bob_gain,
            }),
            settings,
        })
    }

    /// `T_AE = T_AB` and `V = I`: Bob and Eve see statistically identical links.
    pub fn symmetric(t: ComplexMatrix, settings: LinkSettings) -> Result<Self> {
        let n = t.rows();
        LinkConfig::new(t.clone(), t, TapProfile::identity(n), settings)
    }

    pub fn with_artificial_noise(&self, level: f64) -> Result<Self> {
        let settings = LinkSettings {
            artificial_noise_level: level,
            ..self.settings
        };
        settings.validate()?;
        Ok(LinkConfig {
            matrices: Arc::clone(&self.matrices),
            settings,
        })
    }

    pub fn dimension(&self) -> usize {
        self.matrices.t_ab.rows()
    }

    pub fn settings(&self) -> &LinkSettings {
        &self.settings
    }

    pub fn t_ab(&self) -> &ComplexMatrix {
        &self.matrices.t_ab
    }

    pub fn t_ae(&self) -> &ComplexMatrix {
        &self.matrices.t_ae
    }

    pub fn tap(&self) -> &TapProfile {
        &self.matrices.tap
    }

    pub fn t_ab_inverse(&self) -> &ComplexMatrix {
        &self.matrices.t_ab_inv
    }

    pub fn precoding_divisor(&self) -> f64 {
        self.matrices.divisor
    }

    /// Eve's effective channel `H = √V·T_AE·T†_AB`.
    pub fn eve_channel(&self) -> &ComplexMatrix {
        &self.matrices.h
    }

    pub fn eve_inverse(&self) -> &ComplexMatrix {
        &self.matrices.h_inv
    }

    /// Amplitude at which Bob receives a unit message entry.
    pub fn bob_gain(&self) -> f64 {
        self.matrices.bob_gain
    }

    /// Absolute per-component receiver noise std.
    pub fn absolute_noise_std(&self) -> f64 {
        self.settings.receiver_noise_std * self.matrices.bob_gain
    }

    pub fn precode(&self, x: &[Complex64], seed: Seed) -> Result<Vec<Complex64>> {
        precode_with(&self.matrices.t_ab_inv, self.matrices.divisor, x, self.settings.artificial_noise(), seed)
    }

    pub fn observe_bob(&self, x_precoded: &[Complex64], seed: Seed) -> Result<Vec<Complex64>> {
        transmit_bob(&self.matrices.t_ab, x_precoded, self.absolute_noise_std(), seed)
    }

    /// Eve's raw tap output, before equalization.
    pub fn observe_eve(&self, x_precoded: &[Complex64], seed: Seed) -> Result<Vec<Complex64>> {
        transmit_eve(&self.matrices.t_ae, &self.matrices.tap, x_precoded, self.absolute_noise_std(), seed)
    }
}

/// Spectral norm, the worst-case noise amplification of a linear map.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(svd(m)?.max_singular_value())
}

/// Where a transmission matrix comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MatrixSource {
    Haar { seed: Seed },
    Coupled { epsilon: f64, seed: Seed },
    File { path: PathBuf },
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSpec {
    #[serde(flatten)]
    pub source: MatrixSource,
    /// Relative measurement noise applied on top of the source matrix.
    #[serde(default)]
    pub measurement_noise: f64,
    #[serde(default)]
    pub measurement_seed: Seed,
}

impl MatrixSpec {
    pub fn haar(seed: u64) -> Self {
        MatrixSpec {
            source: MatrixSource::Haar { seed: Seed(seed) },
            measurement_noise: 0.0,
            measurement_seed: Seed(0),
        }
    }

    /// Produce the `n × n` matrix; relative file paths resolve against `base_dir`.
    pub fn realize(&self, n: usize, base_dir: &Path) -> Result<ComplexMatrix> {
        let m = match &self.source {
            MatrixSource::Haar { seed } => haar_unitary(n, *seed)?,
            MatrixSource::Coupled { epsilon, seed } => coupled_unitary(n, *epsilon, *seed)?,
            MatrixSource::Identity => ComplexMatrix::identity(n),
            MatrixSource::File { path } => {
                let path = if path.is_absolute() { path.clone() } else { base_dir.join(path) };
                let (m, _) = load_matrix(&path)?;
                if m.rows() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "{} holds a {}x{} matrix but the basis has {n} modes",
                        path.display(),
                        m.rows(),
                        m.cols()
                    )));
                }
                m
            }
        };
        emulate_measurement(&m, self.measurement_noise, self.measurement_seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TapKind {
    #[default]
    EdgePower,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TapSpec {
    pub kind: TapKind,
    pub rho: f64,
    pub sigma_sq_min: f64,
}

impl Default for TapSpec {
    fn default() -> Self {
        TapSpec {
            kind: TapKind::EdgePower,
            rho: DEFAULT_EDGE_RHO,
            sigma_sq_min: DEFAULT_SIGMA_SQ_MIN,
        }
    }
}

impl TapSpec {
    pub fn build(&self, basis: &ModeBasis) -> Result<TapProfile> {
        match self.kind {
            TapKind::EdgePower => build_tap_matrix(basis, self.rho, self.sigma_sq_min),
            TapKind::Identity => Ok(TapProfile::identity(basis.len())),
        }
    }
}

/// Serializable description of a [`LinkConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkDocument {
    pub t_ab: MatrixSpec,
    /// Eve's channel; `None` reuses Bob's matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_ae: Option<MatrixSpec>,
    #[serde(default)]
    pub tap: TapSpec,
    #[serde(flatten)]
    pub settings: LinkSettings,
}

impl Default for LinkDocument {
    fn default() -> Self {
        LinkDocument {
            t_ab: MatrixSpec::haar(1),
            t_ae: None,
            tap: TapSpec::default(),
            settings: LinkSettings::default(),
        }
    }
}

impl LinkDocument {
    pub fn build(&self, basis: &ModeBasis, base_dir: &Path) -> Result<LinkConfig> {
        let tap = self.tap.build(basis)?;
        self.build_with_tap(basis.len(), tap, base_dir)
    }

    /// Assemble with a precomputed tap, e.g. to reuse one tap across many seeds.
    pub fn build_with_tap(&self, n: usize, tap: TapProfile, base_dir: &Path) -> Result<LinkConfig> {
        let t_ab = self.t_ab.realize(n, base_dir)?;
        let t_ae = match &self.t_ae {
            Some(spec) => spec.realize(n, base_dir)?,
            None => t_ab.clone(),
        };
        LinkConfig::new(t_ab, t_ae, tap, self.settings)
    }
}
