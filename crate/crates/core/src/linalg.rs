//! Dense complex matrices: SVD, regularized inversion, random unitaries and
//! the precoding normalizations.

use std::fmt;
use std::io::{Read, Write};
use std::ops::Index;

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::{complex_gaussian, Seed};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Iteration cap handed to the SVD; reaching it is reported as non-convergence.
pub const SVD_MAX_ITERATIONS: usize = 10_000;

/// Dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix {}x{} {:?}", self.rows(), self.cols(), self.0.as_slice())
    }
}

impl ComplexMatrix {
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!("empty {rows}x{cols} matrix")));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::param("entries", format!("entry {pos} is not finite")));
        }
        Ok(ComplexMatrix(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        ComplexMatrix(DMatrix::from_fn(rows, cols, f))
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        ComplexMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        ComplexMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { ZERO })
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(ComplexMatrix(&self.0 * &other.0))
    }

    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix applied to a length-{} vector",
                self.rows(),
                self.cols(),
                x.len()
            )));
        }
        let mut y = vec![ZERO; self.rows()];
        for (j, &xj) in x.iter().enumerate() {
            if xj == ZERO {
                continue;
            }
            for (i, yi) in y.iter_mut().enumerate() {
                *yi += self.0[(i, j)] * xj;
            }
        }
        Ok(y)
    }

    /// Left-multiply by a real diagonal, i.e. scale row `i` by `d[i]`.
    pub fn scale_rows(&self, d: &[f64]) -> Result<Self> {
        if d.len() != self.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{} row factors for {} rows",
                d.len(),
                self.rows()
            )));
        }
        let mut m = self.0.clone();
        for (i, &di) in d.iter().enumerate() {
            m.row_mut(i).scale_mut(di);
        }
        Ok(ComplexMatrix(m))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexMatrix(self.0.map(|z| z * c))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Root-mean-square entry magnitude.
    pub fn rms(&self) -> f64 {
        self.frobenius_norm() / ((self.rows() * self.cols()) as f64).sqrt()
    }

    /// Largest entry-wise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows(), self.cols()), (other.rows(), other.cols()));
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows().min(self.cols())).map(|i| self.0[(i, i)]).collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl From<DMatrix<Complex64>> for ComplexMatrix {
    fn from(m: DMatrix<Complex64>) -> Self {
        ComplexMatrix(m)
    }
}

/// Thin SVD `M = U·diag(s)·V^H` with `s` descending.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub left_vectors: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub right_vectors_conjugated: ComplexMatrix,
}

impl SvdFactors {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let u = &self.left_vectors.0;
        let vh = &self.right_vectors_conjugated.0;
        let mut us = u.clone();
        for (j, &s) in self.singular_values.iter().enumerate() {
            us.column_mut(j).scale_mut(s);
        }
        ComplexMatrix(us * vh)
    }

    pub fn max_singular_value(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }
}

pub fn svd(m: &ComplexMatrix) -> Result<SvdFactors> {
    let factors = SVD::try_new_unordered(m.0.clone(), true, true, f64::EPSILON, SVD_MAX_ITERATIONS)
        .ok_or(Error::SvdNotConverged {
            iterations: SVD_MAX_ITERATIONS,
        })?;
    let u = factors.u.expect("requested U");
    let v_t = factors.v_t.expect("requested V^H");
    let s = factors.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let left = DMatrix::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]);
    let right = DMatrix::from_fn(order.len(), v_t.ncols(), |i, j| v_t[(order[i], j)]);
    Ok(SvdFactors {
        left_vectors: ComplexMatrix(left),
        singular_values: order.iter().map(|&k| s[k]).collect(),
        right_vectors_conjugated: ComplexMatrix(right),
    })
}

/// Regularization parameter for [`tikhonov_inverse`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaRule {
    /// Absolute α.
    Fixed(f64),
    /// α as a fraction of the largest singular value.
    RelativeToMax(f64),
}

impl AlphaRule {
    /// The 12 %-of-σ_max rule.
    pub const DEFAULT: AlphaRule = AlphaRule::RelativeToMax(0.12);
    pub const NONE: AlphaRule = AlphaRule::Fixed(0.0);

    pub fn resolve(&self, sigma_max: f64) -> f64 {
        match *self {
            AlphaRule::Fixed(alpha) => alpha,
            AlphaRule::RelativeToMax(fraction) => fraction * sigma_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let value = match *self {
            AlphaRule::Fixed(v) | AlphaRule::RelativeToMax(v) => v,
        };
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::param("alpha", format!("must be finite and non-negative, got {value}")));
        }
        Ok(())
    }
}

impl Default for AlphaRule {
    fn default() -> Self {
        AlphaRule::DEFAULT
    }
}

impl fmt::Display for AlphaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AlphaRule::DEFAULT => f.write_str("default"),
            AlphaRule::Fixed(a) => write!(f, "fixed:{a}"),
            AlphaRule::RelativeToMax(r) => write!(f, "relative:{r}"),
        }
    }
}

impl std::str::FromStr for AlphaRule {
    type Err = Error;

    /// Accepts `default`, `none`, `fixed:<α>`, `relative:<fraction>` or a bare number (fixed).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::param("alpha", format!("cannot parse `{s}`"));
        let rule = match s {
            "default" => AlphaRule::DEFAULT,
            "none" => AlphaRule::NONE,
            _ => {
                if let Some(v) = s.strip_prefix("fixed:") {
                    AlphaRule::Fixed(v.trim().parse().map_err(|_| bad())?)
                } else if let Some(v) = s.strip_prefix("relative:") {
                    AlphaRule::RelativeToMax(v.trim().parse().map_err(|_| bad())?)
                } else {
                    AlphaRule::Fixed(s.parse().map_err(|_| bad())?)
                }
            }
        };
        rule.validate()?;
        Ok(rule)
    }
}

impl Serialize for AlphaRule {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AlphaRule {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Number(v) => {
                let rule = AlphaRule::Fixed(v);
                rule.validate().map_err(serde::de::Error::custom)?;
                Ok(rule)
            }
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Tikhonov filter value σ/(σ² + α²); zero singular values stay zero when α = 0.
pub fn tikhonov_filter(sigma: f64, alpha: f64) -> f64 {
    let denom = sigma * sigma + alpha * alpha;
    if denom == 0.0 {
        0.0
    } else {
        sigma / denom
    }
}

/// Regularized pseudo-inverse `V·diag(σ/(σ²+α²))·U^H`.
pub fn tikhonov_inverse(m: &ComplexMatrix, rule: AlphaRule) -> Result<ComplexMatrix> {
    rule.validate()?;
    let factors = svd(m)?;
    let alpha = rule.resolve(factors.max_singular_value());
    if factors.max_singular_value() == 0.0 && alpha == 0.0 {
        return Err(Error::UndefinedInverse);
    }
    Ok(filtered_inverse(&factors, alpha))
}

pub(crate) fn filtered_inverse(factors: &SvdFactors, alpha: f64) -> ComplexMatrix {
    // (V^H)^H · S · U^H
    let mut v = factors.right_vectors_conjugated.0.adjoint();
    for (j, &s) in factors.singular_values.iter().enumerate() {
        v.column_mut(j).scale_mut(tikhonov_filter(s, alpha));
    }
    ComplexMatrix(v * factors.left_vectors.0.adjoint())
}

fn gaussian_matrix(n: usize, std: f64, seed: Seed) -> DMatrix<Complex64> {
    let mut rng = seed.rng();
    // Row-major fill so the stream order matches the matrix file layout.
    let entries: Vec<Complex64> = (0..n * n).map(|_| complex_gaussian(&mut rng, std)).collect();
    DMatrix::from_row_slice(n, n, &entries)
}

/// Haar-distributed unitary from the QR decomposition of a complex Ginibre
/// matrix, with the phases of R's diagonal pushed into Q.
pub fn haar_unitary(n: usize, seed: Seed) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    let z = gaussian_matrix(n, std::f64::consts::FRAC_1_SQRT_2, seed);
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    Ok(ComplexMatrix(q))
}

/// `exp(i·ε·G)` for a random Hermitian `G = (A + A^H)/(2√n)` with complex
/// Gaussian `A`; its spectrum fills roughly [−2, 2], so ε of order one already
/// mixes all modes.
pub fn coupled_unitary(n: usize, epsilon: f64, seed: Seed) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::param("epsilon", format!("must be finite and non-negative, got {epsilon}")));
    }
    if epsilon == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let a = gaussian_matrix(n, std::f64::consts::FRAC_1_SQRT_2, seed);
    let g = (&a + a.adjoint()) * Complex64::new(0.5 / (n as f64).sqrt(), 0.0);
    let eig = g.symmetric_eigen();
    let mut q = eig.eigenvectors.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, epsilon * lambda);
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    Ok(ComplexMatrix(q * eig.eigenvectors.adjoint()))
}

/// Add complex Gaussian noise with per-component std `sigma_meas·rms(m)`.
pub fn emulate_measurement(m: &ComplexMatrix, sigma_meas: f64, seed: Seed) -> Result<ComplexMatrix> {
    if !(sigma_meas.is_finite() && sigma_meas >= 0.0) {
        return Err(Error::param("sigma_meas", format!("must be finite and non-negative, got {sigma_meas}")));
    }
    if sigma_meas == 0.0 {
        return Ok(m.clone());
    }
    let std = sigma_meas * m.rms();
    let mut rng = seed.rng();
    let entries = m.to_row_major().into_iter().map(|z| z + complex_gaussian(&mut rng, std)).collect();
    ComplexMatrix::from_row_major(m.rows(), m.cols(), entries)
}

pub fn vector_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize_unit(x: &[Complex64]) -> Result<Vec<Complex64>> {
    let norm = vector_norm(x);
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(x.iter().map(|z| z / norm).collect())
}

/// `√tr(T·T^H)`, the power normalization applied after precoding.
pub fn precoding_divisor(t_inv: &ComplexMatrix) -> Result<f64> {
    if !t_inv.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "precoding matrix must be square, got {}x{}",
            t_inv.rows(),
            t_inv.cols()
        )));
    }
    let trace: f64 = (0..t_inv.rows())
        .map(|i| t_inv.0.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum();
    if trace <= 0.0 {
        return Err(Error::ZeroTrace);
    }
    Ok(trace.sqrt())
}

pub fn normalize_precoded(x_hat: &[Complex64], t_inv: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let divisor = precoding_divisor(t_inv)?;
    Ok(x_hat.iter().map(|z| z / divisor).collect())
}

/// Ratio of mean diagonal power to mean diagonal plus mean off-diagonal power.
pub fn precoding_efficiency(t_diag: &ComplexMatrix) -> Result<f64> {
    if !t_diag.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "precoding efficiency needs a square matrix, got {}x{}",
            t_diag.rows(),
            t_diag.cols()
        )));
    }
    let n = t_diag.rows();
    if n == 1 {
        return Ok(1.0);
    }
    let mut diag = 0.0;
    let mut off = 0.0;
    for i in 0..n {
        for j in 0..n {
            let p = t_diag[(i, j)].norm_sqr();
            if i == j {
                diag += p;
            } else {
                off += p;
            }
        }
    }
    let p_d = diag / n as f64;
    let p_b = off / (n * (n - 1)) as f64;
    if p_d + p_b == 0.0 {
        return Err(Error::param("t_diag", "all entries are zero"));
    }
    Ok(p_d / (p_d + p_b))
}

/// On-disk transmission matrix: `{"n", "basis", "data": [[re, im], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub basis: String,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix, basis: impl Into<String>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "matrix files hold square matrices, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(MatrixFile {
            n: m.rows(),
            basis: basis.into(),
            data: m.to_row_major().into_iter().map(|z| [z.re, z.im]).collect(),
        })
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.data.len() != self.n * self.n {
            return Err(Error::DimensionMismatch(format!(
                "matrix file declares n = {} but holds {} entries",
                self.n,
                self.data.len()
            )));
        }
        ComplexMatrix::from_row_major(
            self.n,
            self.n,
            self.data.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        )
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer(writer, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self> {
        Ok(serde_json::from_reader(reader)?)
    }
}

pub fn load_matrix(path: impl AsRef<std::path::Path>) -> Result<(ComplexMatrix, String)> {
    let file = std::fs::File::open(path)?;
    let doc = MatrixFile::read_json(std::io::BufReader::new(file))?;
    let m = doc.to_matrix()?;
    Ok((m, doc.basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        let mut rng = Seed(seed).rng();
        ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(&mut rng, 1.0))
    }

    #[test]
    fn row_major_construction_checks() {
        assert!(ComplexMatrix::from_row_major(2, 2, vec![ONE; 3]).is_err());
        assert!(ComplexMatrix::from_row_major(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        let m = ComplexMatrix::from_row_major(2, 3, (0..6).map(|k| c(k as f64, 0.0)).collect()).unwrap();
        assert_eq!(m[(0, 2)], c(2.0, 0.0));
        assert_eq!(m[(1, 0)], c(3.0, 0.0));
    }

    #[test]
    fn svd_of_identity_and_diagonal() {
        let f = svd(&ComplexMatrix::identity(3)).unwrap();
        assert!(f.singular_values.iter().all(|&s| (s - 1.0).abs() < 1e-14));
        let f = svd(&ComplexMatrix::from_real_diagonal(&[0.0, 3.0])).unwrap();
        assert!((f.singular_values[0] - 3.0).abs() < 1e-14);
        assert!(f.singular_values[1].abs() < 1e-14);
    }

    #[test]
    fn svd_reconstructs_rectangular() {
        let m = random_matrix(7, 4, 3);
        let f = svd(&m).unwrap();
        assert_eq!(f.singular_values.len(), 4);
        assert!(f.reconstruct().max_abs_diff(&m) / m.frobenius_norm() < 1e-12);
        assert!(f.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn tikhonov_edge_cases() {
        let i4 = ComplexMatrix::identity(4);
        assert!(tikhonov_inverse(&i4, AlphaRule::NONE).unwrap().max_abs_diff(&i4) < 1e-14);
        let d = tikhonov_inverse(&ComplexMatrix::from_real_diagonal(&[2.0]), AlphaRule::NONE).unwrap();
        assert!((d[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!(matches!(
            tikhonov_inverse(&ComplexMatrix::zeros(3, 3), AlphaRule::NONE),
            Err(Error::UndefinedInverse)
        ));
        let z = tikhonov_inverse(&ComplexMatrix::zeros(2, 2), AlphaRule::Fixed(0.1)).unwrap();
        assert_eq!(z.frobenius_norm(), 0.0);
        // Rank-deficient with α = 0 behaves as the pseudo-inverse.
        let p = tikhonov_inverse(&ComplexMatrix::from_real_diagonal(&[4.0, 0.0]), AlphaRule::NONE).unwrap();
        assert!((p[(0, 0)] - c(0.25, 0.0)).norm() < 1e-15 && p[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn default_alpha_is_relative() {
        let m = ComplexMatrix::from_real_diagonal(&[10.0, 1.0]);
        let inv = tikhonov_inverse(&m, AlphaRule::DEFAULT).unwrap();
        let alpha = 1.2;
        assert!((inv[(0, 0)].re - 10.0 / (100.0 + alpha * alpha)).abs() < 1e-14);
        assert!((inv[(1, 1)].re - 1.0 / (1.0 + alpha * alpha)).abs() < 1e-14);
    }

    #[test]
    fn alpha_rule_text_forms() {
        assert_eq!("default".parse::<AlphaRule>().unwrap(), AlphaRule::DEFAULT);
        assert_eq!("none".parse::<AlphaRule>().unwrap(), AlphaRule::Fixed(0.0));
        assert_eq!("0.3".parse::<AlphaRule>().unwrap(), AlphaRule::Fixed(0.3));
        assert_eq!("relative:0.05".parse::<AlphaRule>().unwrap(), AlphaRule::RelativeToMax(0.05));
        assert!("fixed:-1".parse::<AlphaRule>().is_err());
        assert!("soon".parse::<AlphaRule>().is_err());
        for rule in [AlphaRule::DEFAULT, AlphaRule::Fixed(0.25), AlphaRule::RelativeToMax(0.5)] {
            let text = serde_json::to_string(&rule).unwrap();
            assert_eq!(serde_json::from_str::<AlphaRule>(&text).unwrap(), rule);
        }
        assert_eq!(serde_json::from_str::<AlphaRule>("0.5").unwrap(), AlphaRule::Fixed(0.5));
    }

    #[test]
    fn haar_scalar_has_unit_modulus() {
        let u = haar_unitary(1, Seed(5)).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_is_unitary_and_deterministic() {
        let u = haar_unitary(55, Seed(1)).unwrap();
        let uuh = u.matmul(&u.adjoint()).unwrap();
        assert!(uuh.max_abs_diff(&ComplexMatrix::identity(55)) < 1e-10);
        assert_eq!(u, haar_unitary(55, Seed(1)).unwrap());
        assert_ne!(u, haar_unitary(55, Seed(2)).unwrap());
    }

    #[test]
    fn coupled_unitary_limits() {
        assert_eq!(coupled_unitary(6, 0.0, Seed(3)).unwrap(), ComplexMatrix::identity(6));
        for eps in [0.01, 0.7, 5.0] {
            let u = coupled_unitary(20, eps, Seed(4)).unwrap();
            let uuh = u.matmul(&u.adjoint()).unwrap();
            assert!(uuh.max_abs_diff(&ComplexMatrix::identity(20)) < 1e-9);
        }
        assert!(coupled_unitary(4, -1.0, Seed(0)).is_err());
    }

    #[test]
    fn measurement_noise_zero_is_identity() {
        let m = random_matrix(5, 5, 8);
        assert_eq!(emulate_measurement(&m, 0.0, Seed(1)).unwrap(), m);
    }

    #[test]
    fn perturbed_identity_loses_efficiency() {
        let noisy = emulate_measurement(&ComplexMatrix::identity(55), 0.1, Seed(2)).unwrap();
        assert!(precoding_efficiency(&noisy).unwrap() < 1.0);
    }

    #[test]
    fn unit_normalization() {
        let v = normalize_unit(&[c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((v[0] - c(0.6, 0.0)).norm() < 1e-15 && (v[1] - c(0.0, 0.8)).norm() < 1e-15);
        assert!(matches!(normalize_unit(&[ZERO, ZERO]), Err(Error::ZeroVector)));
    }

    #[test]
    fn precoded_normalization() {
        assert!((precoding_divisor(&ComplexMatrix::identity(9)).unwrap() - 3.0).abs() < 1e-15);
        let m = random_matrix(6, 6, 11);
        let d = precoding_divisor(&m).unwrap();
        let scaled = precoding_divisor(&m.scale(c(0.0, -2.5))).unwrap();
        assert!((scaled - 2.5 * d).abs() < 1e-12 * d);
        assert!(matches!(precoding_divisor(&ComplexMatrix::zeros(2, 2)), Err(Error::ZeroTrace)));
    }

    #[test]
    fn efficiency_conventions() {
        assert_eq!(precoding_efficiency(&ComplexMatrix::identity(55)).unwrap(), 1.0);
        assert_eq!(precoding_efficiency(&ComplexMatrix::from_diagonal(&[c(0.0, 3.0)])).unwrap(), 1.0);
        let flat = ComplexMatrix::from_fn(4, 4, |i, j| Complex64::from_polar(2.0, (i * 4 + j) as f64));
        assert!((precoding_efficiency(&flat).unwrap() - 0.5).abs() < 1e-14);
        assert!(precoding_efficiency(&random_matrix(2, 3, 0)).is_err());
    }

    #[test]
    fn matrix_file_round_trip() {
        let m = haar_unitary(6, Seed(77)).unwrap();
        let doc = MatrixFile::from_matrix(&m, "LP").unwrap();
        let mut buf = Vec::new();
        doc.write_json(&mut buf).unwrap();
        let back = MatrixFile::read_json(buf.as_slice()).unwrap();
        assert_eq!(back.basis, "LP");
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    #[test]
    fn matrix_file_rejects_bad_length() {
        let doc = MatrixFile {
            n: 2,
            basis: "LP".into(),
            data: vec![[1.0, 0.0]; 3],
        };
        assert!(doc.to_matrix().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn tikhonov_of_unitary_without_alpha_is_adjoint(n in 1usize..12, seed in any::<u64>()) {
            let u = haar_unitary(n, Seed(seed)).unwrap();
            let inv = tikhonov_inverse(&u, AlphaRule::NONE).unwrap();
            prop_assert!(inv.max_abs_diff(&u.adjoint()) < 1e-10);
        }

        #[test]
        fn filter_is_bounded(sigma in 0.0f64..1e3, alpha in 1e-6f64..1e2) {
            prop_assert!(tikhonov_filter(sigma, alpha) <= 1.0 / (2.0 * alpha) * (1.0 + 1e-12));
        }

        #[test]
        fn random_unitaries_are_unitary(n in 1usize..16, eps in 0.0f64..4.0, seed in any::<u64>()) {
            for u in [haar_unitary(n, Seed(seed)).unwrap(), coupled_unitary(n, eps, Seed(seed)).unwrap()] {
                let uuh = u.matmul(&u.adjoint()).unwrap();
                prop_assert!(uuh.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-9);
            }
        }

        #[test]
        fn random_generation_is_reproducible(n in 1usize..10, eps in 0.0f64..3.0, sigma in 0.0f64..0.5, seed in any::<u64>()) {
            prop_assert_eq!(haar_unitary(n, Seed(seed)).unwrap(), haar_unitary(n, Seed(seed)).unwrap());
            prop_assert_eq!(coupled_unitary(n, eps, Seed(seed)).unwrap(), coupled_unitary(n, eps, Seed(seed)).unwrap());
            let m = haar_unitary(n, Seed(seed)).unwrap();
            prop_assert_eq!(
                emulate_measurement(&m, sigma, Seed(seed ^ 1)).unwrap(),
                emulate_measurement(&m, sigma, Seed(seed ^ 1)).unwrap()
            );
        }

        #[test]
        fn diagonalized_chain_is_efficient(n in 2usize..20, seed in any::<u64>()) {
            let t = haar_unitary(n, Seed(seed)).unwrap();
            let chain = t.matmul(&tikhonov_inverse(&t, AlphaRule::NONE).unwrap()).unwrap();
            prop_assert!(precoding_efficiency(&chain).unwrap() >= 0.999);
        }

        #[test]
        fn normalize_unit_gives_unit_norm(parts in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..40)) {
            let x: Vec<Complex64> = parts.iter().map(|&(re, im)| c(re, im)).collect();
            prop_assume!(vector_norm(&x) > 1e-9);
            let y = normalize_unit(&x).unwrap();
            prop_assert!((vector_norm(&y) - 1.0).abs() < 1e-12);
            let again = normalize_unit(&y).unwrap();
            prop_assert!(again.iter().zip(&y).all(|(a, b)| (a - b).norm() < 1e-12));
        }

        #[test]
        fn svd_invariants(rows in 1usize..9, cols in 1usize..9, seed in any::<u64>()) {
            let m = random_matrix(rows, cols, seed);
            let f = svd(&m).unwrap();
            prop_assert!(f.reconstruct().max_abs_diff(&m) / m.frobenius_norm() < 1e-10);
            let k = rows.min(cols);
            let uhu = f.left_vectors.adjoint().matmul(&f.left_vectors).unwrap();
            let vvh = f.right_vectors_conjugated.matmul(&f.right_vectors_conjugated.adjoint()).unwrap();
            prop_assert!(uhu.max_abs_diff(&ComplexMatrix::identity(k)) < 1e-10);
            prop_assert!(vvh.max_abs_diff(&ComplexMatrix::identity(k)) < 1e-10);
            prop_assert!(f.singular_values.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(f.singular_values.iter().all(|&s| s >= 0.0));
        }
    }
}
