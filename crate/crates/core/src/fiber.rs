//! Guided LP modes of a weakly-guiding step-index fiber.
//!
//! Modes are ordered by `l`, then `m`, then cosine before sine; this order
//! defines the channel index used everywhere else in the crate.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j, bessel_j_zeros, bessel_k_scaled, bisect};
use crate::error::{Error, Result};

/// Step-index fiber geometry. Lengths in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FiberSpecDoc", into = "FiberSpecDoc")]
pub struct FiberSpec {
    core_radius: f64,
    numerical_aperture: f64,
    wavelength: f64,
    core_index: f64,
}

#[derive(Serialize, Deserialize)]
struct FiberSpecDoc {
    core_radius: f64,
    numerical_aperture: f64,
    wavelength: f64,
    #[serde(default = "default_core_index")]
    core_index: f64,
}

fn default_core_index() -> f64 {
    FiberSpec::DEFAULT_CORE_INDEX
}

impl TryFrom<FiberSpecDoc> for FiberSpec {
    type Error = Error;

    fn try_from(doc: FiberSpecDoc) -> Result<Self> {
        FiberSpec::new(doc.core_radius, doc.numerical_aperture, doc.wavelength)?
            .with_core_index(doc.core_index)
    }
}

impl From<FiberSpec> for FiberSpecDoc {
    fn from(f: FiberSpec) -> Self {
        FiberSpecDoc {
            core_radius: f.core_radius,
            numerical_aperture: f.numerical_aperture,
            wavelength: f.wavelength,
            core_index: f.core_index,
        }
    }
}

impl FiberSpec {
    pub const DEFAULT_CORE_INDEX: f64 = 1.46;

    pub fn new(core_radius: f64, numerical_aperture: f64, wavelength: f64) -> Result<Self> {
        let spec = FiberSpec {
            core_radius,
            numerical_aperture,
            wavelength,
            core_index: Self::DEFAULT_CORE_INDEX,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_core_index(mut self, core_index: f64) -> Result<Self> {
        self.core_index = core_index;
        self.validate()?;
        Ok(self)
    }

    /// 25 µm core, NA 0.1 step-index fiber at 532 nm.
    pub fn reference() -> Self {
        FiberSpec::new(12.5e-6, 0.1, 532e-9).expect("reference fiber parameters are valid")
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("core_radius", self.core_radius),
            ("numerical_aperture", self.numerical_aperture),
            ("wavelength", self.wavelength),
            ("core_index", self.core_index),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidFiber {
                    field,
                    reason: format!("must be finite and strictly positive, got {value}"),
                });
            }
        }
        if self.numerical_aperture >= self.core_index {
            return Err(Error::InvalidFiber {
                field: "numerical_aperture",
                reason: format!(
                    "must be below the core index {} (got {})",
                    self.core_index, self.numerical_aperture
                ),
            });
        }
        Ok(())
    }

    pub fn core_radius(&self) -> f64 {
        self.core_radius
    }

    pub fn numerical_aperture(&self) -> f64 {
        self.numerical_aperture
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn core_index(&self) -> f64 {
        self.core_index
    }

    pub fn cladding_index(&self) -> f64 {
        (self.core_index * self.core_index - self.numerical_aperture * self.numerical_aperture).sqrt()
    }

    /// Normalized frequency 2π·a·NA/λ.
    pub fn v_number(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.core_radius * self.numerical_aperture / self.wavelength
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Cosine,
    Sine,
}

impl Orientation {
    fn suffix(self) -> &'static str {
        match self {
            Orientation::Cosine => "c",
            Orientation::Sine => "s",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpMode {
    pub l: u32,
    pub m: u32,
    pub orientation: Orientation,
    /// Normalized transverse wavenumber in the core.
    pub u: f64,
    /// Normalized decay constant in the cladding.
    pub w: f64,
    pub channel_index: usize,
}

impl LpMode {
    pub fn label(&self) -> String {
        if self.l == 0 {
            format!("LP{}{}", self.l, self.m)
        } else {
            format!("LP{}{}{}", self.l, self.m, self.orientation.suffix())
        }
    }

    fn angular(&self, cos_phi: f64, sin_phi: f64) -> f64 {
        if self.l == 0 {
            return 1.0;
        }
        let e = Complex64::new(cos_phi, sin_phi).powu(self.l);
        match self.orientation {
            Orientation::Cosine => e.re,
            Orientation::Sine => e.im,
        }
    }
}

impl fmt::Display for LpMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Cartesian sampling window centered on the fiber axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Half-width of the square window in units of the core radius.
    pub half_width: f64,
    /// Samples per side.
    pub resolution: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            half_width: 1.5,
            resolution: 512,
        }
    }
}

impl GridSpec {
    pub fn samples(&self) -> usize {
        self.resolution * self.resolution
    }

    /// Sample spacing in units of the core radius.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.resolution as f64
    }

    /// Coordinate of sample `i` along one axis, in units of the core radius.
    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.spacing()
    }

    fn validate(&self) -> Result<()> {
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::param("grid.half_width", "must be positive"));
        }
        if self.resolution < 2 || !self.resolution.is_multiple_of(2) {
            return Err(Error::param("grid.resolution", "must be an even number ≥ 2"));
        }
        Ok(())
    }
}

/// Radial quadrature settings for power integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialQuadrature {
    /// Outer integration radius in units of the core radius.
    pub extent: f64,
    pub points: usize,
}

impl Default for RadialQuadrature {
    fn default() -> Self {
        RadialQuadrature {
            extent: 3.0,
            points: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeBasis {
    pub fiber: FiberSpec,
    pub modes: Vec<LpMode>,
    pub grid: GridSpec,
}

impl ModeBasis {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn edge_power_fractions(&self, rho: f64) -> Result<Vec<f64>> {
        self.modes
            .iter()
            .map(|mode| edge_power_fraction(mode, &self.fiber, rho))
            .collect()
    }

    /// Sample every mode on the basis grid, normalized to unit discrete power.
    pub fn sample(&self) -> Result<SampledBasis> {
        SampledBasis::new(self)
    }

    pub fn table(&self, rho: f64) -> Result<ModeTable> {
        let fractions = self.edge_power_fractions(rho)?;
        let fiber = &self.fiber;
        Ok(ModeTable {
            fiber: FiberSummary {
                core_radius: fiber.core_radius(),
                numerical_aperture: fiber.numerical_aperture(),
                wavelength: fiber.wavelength(),
                core_index: fiber.core_index(),
                cladding_index: fiber.cladding_index(),
                v_number: fiber.v_number(),
            },
            grid: self.grid,
            edge_rho: rho,
            mode_count: self.len(),
            modes: self
                .modes
                .iter()
                .zip(fractions)
                .map(|(mode, edge_power_fraction)| ModeRecord {
                    channel: mode.channel_index + 1,
                    label: mode.label(),
                    l: mode.l,
                    m: mode.m,
                    orientation: mode.orientation,
                    u: mode.u,
                    w: mode.w,
                    channel_index: mode.channel_index,
                    edge_power_fraction,
                })
                .collect(),
        })
    }
}

/// Exported mode table document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeTable {
    pub fiber: FiberSummary,
    pub grid: GridSpec,
    pub edge_rho: f64,
    pub mode_count: usize,
    pub modes: Vec<ModeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberSummary {
    pub core_radius: f64,
    pub numerical_aperture: f64,
    pub wavelength: f64,
    pub core_index: f64,
    pub cladding_index: f64,
    pub v_number: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    /// One-based channel label.
    pub channel: usize,
    pub label: String,
    pub l: u32,
    pub m: u32,
    pub orientation: Orientation,
    pub u: f64,
    pub w: f64,
    pub channel_index: usize,
    pub edge_power_fraction: f64,
}

/// Characteristic function of the LP dispersion relation,
/// `u·J_{l−1}(u)/J_l(u) + w·K_{l−1}(w)/K_l(w)`; it has poles at the zeros of J_l.
pub fn dispersion_residual(l: u32, u: f64, v: f64) -> f64 {
    let l = l as i32;
    let w = (v * v - u * u).sqrt();
    u * bessel_j(l - 1, u) / bessel_j(l, u) + w * bessel_k_scaled(l - 1, w) / bessel_k_scaled(l, w)
}

const ROOT_TOL: f64 = 1e-13;

/// Roots u of the dispersion relation for azimuthal order `l`, ascending.
pub fn dispersion_roots(l: u32, v: f64) -> Vec<f64> {
    let zeros = bessel_j_zeros(l as i32, v);
    let mut edges = Vec::with_capacity(zeros.len() + 2);
    edges.push(v * 1e-6);
    edges.extend(zeros.iter().copied());
    edges.push(v * (1.0 - 1e-12));

    let residual = |u: f64| dispersion_residual(l, u, v);
    let mut roots = Vec::new();
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let lo = a + 1e-9 * a.max(1.0);
        let hi = if b < edges[edges.len() - 1] { b - 1e-9 * b.max(1.0) } else { b };
        if lo >= hi {
            continue;
        }
        let (f_lo, f_hi) = (residual(lo), residual(hi));
        if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
            continue;
        }
        let u = bisect(residual, lo, hi, ROOT_TOL);
        let w = (v * v - u * u).sqrt();
        if w > 1e-9 * v {
            roots.push(u);
        }
    }
    roots
}

/// Solve the guided modes on the default sampling grid.
pub fn solve_modes(fiber: &FiberSpec) -> Result<ModeBasis> {
    solve_modes_on_grid(fiber, GridSpec::default())
}

pub fn solve_modes_on_grid(fiber: &FiberSpec, grid: GridSpec) -> Result<ModeBasis> {
    grid.validate()?;
    let v = fiber.v_number();
    let mut modes = Vec::new();
    for l in 0u32.. {
        let roots = dispersion_roots(l, v);
        if roots.is_empty() {
            break;
        }
        for (k, u) in roots.into_iter().enumerate() {
            let w = (v * v - u * u).sqrt();
            let orientations: &[Orientation] = if l == 0 {
                &[Orientation::Cosine]
            } else {
                &[Orientation::Cosine, Orientation::Sine]
            };
            for &orientation in orientations {
                modes.push(LpMode {
                    l,
                    m: k as u32 + 1,
                    orientation,
                    u,
                    w,
                    channel_index: 0,
                });
            }
        }
    }
    if modes.is_empty() {
        return Err(Error::NoGuidedModes { v_number: v });
    }
    modes.sort_by_key(|m| (m.l, m.m, m.orientation));
    for (i, mode) in modes.iter_mut().enumerate() {
        mode.channel_index = i;
    }
    log::debug!("solved {} modes at V = {v:.4}", modes.len());
    Ok(ModeBasis {
        fiber: *fiber,
        modes,
        grid,
    })
}

/// Radial part of a mode with the Bessel normalizations cached.
#[derive(Debug, Clone, Copy)]
struct RadialProfile {
    l: i32,
    u: f64,
    w: f64,
    j_at_core: f64,
    k_scaled_at_core: f64,
}

impl RadialProfile {
    fn new(mode: &LpMode) -> Self {
        let l = mode.l as i32;
        RadialProfile {
            l,
            u: mode.u,
            w: mode.w,
            j_at_core: bessel_j(l, mode.u),
            k_scaled_at_core: bessel_k_scaled(l, mode.w),
        }
    }

    /// Field amplitude at normalized radius `rho = r/a`.
    fn at(&self, rho: f64) -> f64 {
        if rho <= 1.0 {
            bessel_j(self.l, self.u * rho)
        } else {
            let decay = (-self.w * (rho - 1.0)).exp();
            self.j_at_core * decay * bessel_k_scaled(self.l, self.w * rho) / self.k_scaled_at_core
        }
    }

    fn power_density(&self, rho: f64) -> f64 {
        let f = self.at(rho);
        f * f * rho
    }

    fn simpson(&self, a: f64, b: f64, intervals: usize) -> f64 {
        let n = intervals.max(2) + intervals % 2;
        let h = (b - a) / n as f64;
        let mut sum = self.power_density(a) + self.power_density(b);
        for k in 1..n {
            let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
            sum += weight * self.power_density(a + k as f64 * h);
        }
        sum * h / 3.0
    }

    /// ∫_a^b |f|² ρ dρ by composite Simpson with step `h`, plus the
    /// Richardson error estimate against the half-resolution rule.
    fn power(&self, a: f64, b: f64, h: f64) -> (f64, f64) {
        if b <= a {
            return (0.0, 0.0);
        }
        let n = (((b - a) / h).ceil() as usize).max(4);
        let fine = self.simpson(a, b, n);
        let coarse = self.simpson(a, b, n / 2);
        (fine, (fine - coarse).abs() / 15.0)
    }
}

/// Real field amplitude of `mode` at polar position `(r, phi)`, `r` in meters.
///
/// Inside the core the radial part is `J_l(u·r/a)`; outside it is
/// `A·K_l(w·r/a)` with `A = J_l(u)/K_l(w)`, so the field is continuous at the
/// core boundary.
pub fn mode_field(mode: &LpMode, fiber: &FiberSpec, r: f64, phi: f64) -> f64 {
    debug_assert!(r >= 0.0, "radius must be non-negative");
    let profile = RadialProfile::new(mode);
    let (sin_phi, cos_phi) = phi.sin_cos();
    profile.at(r / fiber.core_radius()) * mode.angular(cos_phi, sin_phi)
}

const QUADRATURE_TOL: f64 = 1e-8;

/// Fraction of the mode power at radii `r ≥ rho·a`.
pub fn edge_power_fraction(mode: &LpMode, _fiber: &FiberSpec, rho: f64) -> Result<f64> {
    edge_power_fraction_with(mode, rho, RadialQuadrature::default())
}

pub fn edge_power_fraction_with(mode: &LpMode, rho: f64, quadrature: RadialQuadrature) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::param("rho", format!("must lie in [0, 1], got {rho}")));
    }
    let profile = RadialProfile::new(mode);
    let h = quadrature.extent / quadrature.points as f64;
    let mut pieces = [(0.0, 0.0); 3];
    pieces[0] = profile.power(0.0, rho, h);
    pieces[1] = profile.power(rho, 1.0, h);
    pieces[2] = profile.power(1.0, quadrature.extent, h);
    let total: f64 = pieces.iter().map(|p| p.0).sum();
    let worst = pieces.iter().map(|p| p.1).sum::<f64>() / total;
    if worst.is_nan() || worst > QUADRATURE_TOL {
        return Err(Error::QuadratureNotConverged {
            l: mode.l,
            m: mode.m,
            points: quadrature.points,
            change: worst,
        });
    }
    let inner = pieces[0].0;
    let edge = pieces[1].0 + pieces[2].0;
    Ok((edge / (inner + edge)).clamp(0.0, 1.0))
}

/// A complex field sampled on a [`GridSpec`]; row-major with rows along y.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl FieldGrid {
    pub fn zeros(grid: GridSpec) -> Self {
        FieldGrid {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.samples()],
        }
    }
}

/// Mode fields sampled on the basis grid and normalized to unit discrete power.
#[derive(Debug, Clone)]
pub struct SampledBasis {
    grid: GridSpec,
    cell_area: f64,
    fields: Vec<Vec<f64>>,
}

impl SampledBasis {
    fn new(basis: &ModeBasis) -> Result<Self> {
        let grid = basis.grid;
        grid.validate()?;
        let res = grid.resolution;
        let half = res / 2;
        // Distance of folded index k from the axis.
        let folded: Vec<f64> = (0..half).map(|k| (k as f64 + 0.5) * grid.spacing()).collect();
        let fold = |i: usize| if i >= half { i - half } else { half - 1 - i };
        let cell_area = grid.spacing() * grid.spacing();

        let fields = basis
            .modes
            .par_iter()
            .map(|mode| {
                let profile = RadialProfile::new(mode);
                let mut radial = vec![0.0; half * half];
                for a in 0..half {
                    for b in a..half {
                        let v = profile.at(folded[a].hypot(folded[b]));
                        radial[a * half + b] = v;
                        radial[b * half + a] = v;
                    }
                }
                let mut field = Vec::with_capacity(res * res);
                for row in 0..res {
                    let y = grid.coordinate(row);
                    for col in 0..res {
                        let x = grid.coordinate(col);
                        let r = x.hypot(y);
                        field.push(radial[fold(row) * half + fold(col)] * mode.angular(x / r, y / r));
                    }
                }
                let norm = (field.iter().map(|v| v * v).sum::<f64>() * cell_area).sqrt();
                field.iter_mut().for_each(|v| *v /= norm);
                field
            })
            .collect();
        Ok(SampledBasis {
            grid,
            cell_area,
            fields,
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn field(&self, index: usize) -> &[f64] {
        &self.fields[index]
    }

    /// Discrete inner products between all sampled modes.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let dot: f64 = self.fields[i].iter().zip(&self.fields[j]).map(|(a, b)| a * b).sum();
                        dot * self.cell_area
                    })
                    .collect()
            })
            .collect()
    }

    /// Superpose the sampled modes with the given complex weights.
    pub fn synthesize(&self, coefficients: &[Complex64]) -> Result<FieldGrid> {
        if coefficients.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a {}-mode basis",
                coefficients.len(),
                self.len()
            )));
        }
        let mut out = FieldGrid::zeros(self.grid);
        for (c, field) in coefficients.iter().zip(&self.fields) {
            for (acc, &f) in out.values.iter_mut().zip(field) {
                *acc += c * f;
            }
        }
        Ok(out)
    }
}

/// Project a sampled field onto each normalized mode (discrete inner product).
pub fn decompose_field(field: &FieldGrid, basis: &SampledBasis) -> Result<Vec<Complex64>> {
    if field.grid != basis.grid || field.values.len() != basis.grid.samples() {
        return Err(Error::GridMismatch {
            expected: basis.grid.samples(),
            found: field.values.len(),
        });
    }
    Ok(basis
        .fields
        .par_iter()
        .map(|mode| {
            let dot: Complex64 = mode.iter().zip(&field.values).map(|(&m, &f)| f * m).sum();
            dot * basis.cell_area
        })
        .collect())
}
