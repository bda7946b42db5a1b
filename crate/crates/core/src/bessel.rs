//! Integer-order Bessel functions J_n and K_n.
//!
//! J_n uses the power series for small arguments and the trapezoidal rule on
//! Bessel's integral `(1/π)∫₀^π cos(nτ − x sin τ) dτ` otherwise; the integrand
//! is periodic and entire, so the rule converges geometrically once the node
//! count exceeds `x + n`. K_n uses the trapezoidal rule on
//! `∫₀^∞ exp(−x cosh t) cosh(nt) dt`, again geometrically convergent.

use std::f64::consts::PI;

/// J_n(x) for integer order n (negative orders via J_{-n} = (−1)^n J_n).
pub fn bessel_j(n: i32, x: f64) -> f64 {
    let order = n.unsigned_abs();
    let mut sign = if n < 0 && order % 2 == 1 { -1.0 } else { 1.0 };
    let mut x = x;
    if x < 0.0 {
        x = -x;
        if order % 2 == 1 {
            sign = -sign;
        }
    }
    sign * bessel_j_nonneg(order, x)
}

fn bessel_j_nonneg(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    if half * half <= 0.5 * (n as f64 + 1.0) {
        return j_series(n, half);
    }
    let intervals = (x + n as f64).ceil() as usize + 32;
    let step = PI / intervals as f64;
    let nf = n as f64;
    let f = |tau: f64| (nf * tau - x * tau.sin()).cos();
    let mut sum = 0.5 * (f(0.0) + f(PI));
    for k in 1..intervals {
        sum += f(k as f64 * step);
    }
    sum / intervals as f64
}

fn j_series(n: u32, half: f64) -> f64 {
    // (x/2)^n / n! computed by repeated multiplication keeps tiny values representable.
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + n as f64));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Exponentially scaled modified Bessel function e^x·K_n(x), x > 0.
pub fn bessel_k_scaled(n: i32, x: f64) -> f64 {
    assert!(x > 0.0, "K_n requires a positive argument, got {x}");
    let nf = n.unsigned_abs() as f64;
    let step = (0.4 / x.sqrt()).min(0.05);
    let t_peak = (nf / x).asinh();
    let log_term = |t: f64| {
        let s = (0.5 * t).sinh();
        -2.0 * x * s * s
    };
    let term = |t: f64| {
        let base = log_term(t);
        0.5 * ((base + nf * t).exp() + (base - nf * t).exp())
    };
    let mut sum = 0.5 * term(0.0);
    let mut k = 1usize;
    loop {
        let t = k as f64 * step;
        let v = term(t);
        sum += v;
        if t > t_peak && v <= 1e-18 * sum {
            break;
        }
        k += 1;
    }
    sum * step
}

/// K_n(x), x > 0.
pub fn bessel_k(n: i32, x: f64) -> f64 {
    bessel_k_scaled(n, x) * (-x).exp()
}

/// Positive zeros of J_n strictly below `limit`, ascending.
pub fn bessel_j_zeros(n: i32, limit: f64) -> Vec<f64> {
    const SCAN_STEP: f64 = 0.25;
    let mut zeros = Vec::new();
    let mut lo = 1e-3;
    let mut f_lo = bessel_j(n, lo);
    while lo < limit {
        let hi = (lo + SCAN_STEP).min(limit);
        let f_hi = bessel_j(n, hi);
        if f_lo == 0.0 {
            zeros.push(lo);
        } else if f_lo.signum() != f_hi.signum() && f_hi != 0.0 {
            zeros.push(bisect(|u| bessel_j(n, u), lo, hi, 1e-15));
        }
        lo = hi;
        f_lo = f_hi;
    }
    zeros
}

/// Bisection for a bracketed sign change of `f` on `[lo, hi]`.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    while hi - lo > tol * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
