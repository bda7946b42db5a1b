//! Reference implementations used only to cross-check the library.
//!
//! Everything here works on plain nested vectors with textbook algorithms
//! (cyclic Jacobi, Gaussian elimination, sorting) and shares no code with
//! the matrix backend under test.

use mmfpls::bessel::{bessel_j, bessel_k_scaled};
use mmfpls::linalg::ComplexMatrix;
use mmfpls::Complex64;

pub type Dense = Vec<Vec<Complex64>>;

pub fn dense(m: &ComplexMatrix) -> Dense {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect()
}

pub fn adjoint(a: &Dense) -> Dense {
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j].conj()).collect()).collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    assert_eq!(a[0].len(), k);
    let mut out = vec![vec![Complex64::new(0.0, 0.0); c]; r];
    for i in 0..r {
        for p in 0..k {
            let aip = a[i][p];
            for j in 0..c {
                out[i][j] += aip * b[p][j];
            }
        }
    }
    out
}

pub fn matvec(a: &Dense, x: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn frobenius(a: &Dense) -> f64 {
    a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn rel_frobenius_error(a: &Dense, reference: &Dense) -> f64 {
    let diff: f64 = a
        .iter()
        .flatten()
        .zip(reference.iter().flatten())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    diff.sqrt() / frobenius(reference)
}

/// Eigenvalues (ascending) of a Hermitian matrix `H = A + iB` through the
/// real symmetric embedding `[[A, −B], [B, A]]`, which carries every
/// eigenvalue of `H` twice; diagonalized by cyclic Jacobi rotations.
pub fn hermitian_eigenvalues(h: &Dense) -> Vec<f64> {
    let n = h.len();
    let m = 2 * n;
    let mut a = vec![vec![0.0f64; m]; m];
    for i in 0..n {
        for j in 0..n {
            let z = h[i][j];
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    let total: f64 = a.iter().flatten().map(|v| v * v).sum();
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off <= 1e-30 * total {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..m).map(|i| a[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    eig.iter().step_by(2).copied().collect()
}

/// Solve `A·X = B` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Dense, mut b: Dense) -> Dense {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let d = a[col][col];
        assert!(d.norm() > 0.0, "singular system");
        for row in col + 1..n {
            let f = a[row][col] / d;
            if f.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            for k in 0..b[0].len() {
                let v = b[col][k];
                b[row][k] -= f * v;
            }
        }
    }
    let cols = b[0].len();
    let mut x = vec![vec![Complex64::new(0.0, 0.0); cols]; n];
    for row in (0..n).rev() {
        for k in 0..cols {
            let mut acc = b[row][k];
            for j in row + 1..n {
                acc -= a[row][j] * x[j][k];
            }
            x[row][k] = acc / a[row][row];
        }
    }
    x
}

/// `(M^H·M + α²·I)^{-1}·M^H`.
pub fn normal_equations_inverse(m: &Dense, alpha: f64) -> Dense {
    let mh = adjoint(m);
    let mut gram = matmul(&mh, m);
    for (i, row) in gram.iter_mut().enumerate() {
        row[i] += Complex64::new(alpha * alpha, 0.0);
    }
    solve(gram, mh)
}

/// Kolmogorov–Smirnov distance between samples and the uniform law on [lo, hi].
pub fn ks_uniform(samples: &[f64], lo: f64, hi: f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
            (cdf - i as f64 / n).abs().max(((i + 1) as f64 / n - cdf).abs())
        })
        .fold(0.0, f64::max)
}

/// One-sample KS critical value at the 1% level (asymptotic).
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// Two-sample KS distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < na && j < nb {
        let x = a[i].min(b[j]);
        while i < na && a[i] <= x {
            i += 1;
        }
        while j < nb && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    d
}

pub fn ks_two_sample_critical_1pct(na: usize, nb: usize) -> f64 {
    1.628 * ((na + nb) as f64 / (na * nb) as f64).sqrt()
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma) * (x - ma)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb) * (y - mb)).sum();
    cov / (va * vb).sqrt()
}

/// Number of guided LP_l roots found by a dense scan of the pole-free form
/// `u·J_{l−1}(u)·K_l(w) + w·K_{l−1}(w)·J_l(u)` over u ∈ (0, V).
pub fn dispersion_sign_changes(l: i32, v: f64, points: usize) -> usize {
    let f = |u: f64| {
        let w = (v * v - u * u).sqrt();
        u * bessel_j(l - 1, u) * bessel_k_scaled(l, w) + w * bessel_k_scaled(l - 1, w) * bessel_j(l, u)
    };
    let lo = v * 1e-6;
    let hi = v * (1.0 - 1e-12);
    let mut count = 0;
    let mut prev = f(lo);
    for k in 1..=points {
        let u = lo + (hi - lo) * k as f64 / points as f64;
        let cur = f(u);
        if cur != 0.0 && prev != 0.0 && cur.signum() != prev.signum() {
            count += 1;
        }
        if cur != 0.0 {
            prev = cur;
        }
    }
    count
}

/// Total mode count implied by the scan, counting both orientations for l > 0.
pub fn brute_force_mode_count(v: f64, points: usize) -> usize {
    let mut total = 0;
    for l in 0.. {
        let roots = dispersion_sign_changes(l, v, points);
        if roots == 0 {
            break;
        }
        total += if l == 0 { roots } else { 2 * roots };
    }
    total
}
