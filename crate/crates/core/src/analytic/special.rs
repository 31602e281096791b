//! Gamma and Riemann zeta at real arguments, and complex Gamma.
//!
//! Values are carried in double precision. Each function reports an error
//! bound combining the truncation remainder of its series with a roundoff
//! allowance.

use super::Certified;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `B_2, B_4, …, B_30`.
const BERNOULLI: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Digits attainable in double precision.
pub const MAX_DIGITS: u32 = 15;

const EPS: f64 = f64::EPSILON;
const STIRLING_SHIFT: f64 = 15.0;
const STIRLING_TERMS: usize = 8;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// `ln Γ(x)` for `x >= 15` by the Stirling series; the remainder is smaller
/// than the first omitted term.
fn ln_gamma_stirling(x: f64) -> f64 {
    let mut s = (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln();
    let x2 = x * x;
    let mut xp = x;
    for j in 1..=STIRLING_TERMS {
        let k = 2.0 * j as f64;
        s += BERNOULLI[j - 1] / (k * (k - 1.0) * xp);
        xp *= x2;
    }
    s
}

/// `ln |Γ(x)|` for real `x` off the poles.
pub fn ln_gamma_abs(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(format!("Gamma at {x}")));
    }
    if x < 0.5 {
        let s = (PI * x).sin().abs();
        return Ok(PI.ln() - s.ln() - ln_gamma_abs(1.0 - x)?);
    }
    let mut z = x;
    let mut log_acc = 0.0;
    while z < STIRLING_SHIFT {
        log_acc += z.ln();
        z += 1.0;
    }
    Ok(ln_gamma_stirling(z) - log_acc)
}

/// `Γ(x)` with a relative error bound.
pub fn gamma_real(x: f64, digits: u32) -> Result<Certified> {
    let _ = digits.min(MAX_DIGITS);
    let v = gamma(x)?;
    let lg = ln_gamma_abs(x)?.abs();
    Ok(Certified { value: v, err: v.abs() * EPS * (20.0 + 2.0 * lg) })
}

/// `Γ(x)` in double precision.
pub fn gamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(format!("Gamma at {x}")));
    }
    if x < 0.5 {
        return Ok(PI / ((PI * x).sin() * gamma(1.0 - x)?));
    }
    if x == x.round() && x <= 20.0 {
        return Ok((1..x as u64).map(|i| i as f64).product());
    }
    let mut z = x;
    let mut acc = 1.0;
    while z < STIRLING_SHIFT {
        acc *= z;
        z += 1.0;
    }
    Ok(ln_gamma_stirling(z).exp() / acc)
}

/// `Γ(z)` for complex `z` off the poles.
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && is_nonpositive_integer(z.re) {
        return Err(Error::Pole(format!("Gamma at {z}")));
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        if s.norm() == 0.0 {
            return Err(Error::Pole(format!("Gamma at {z}")));
        }
        return Ok(Complex64::from(PI) / (s * gamma_complex(Complex64::from(1.0) - z)?));
    }
    let mut w = z;
    let mut acc = Complex64::from(1.0);
    while w.re < STIRLING_SHIFT || w.norm() < STIRLING_SHIFT + 5.0 {
        acc *= w;
        w += 1.0;
    }
    let mut s = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln();
    let w2 = w * w;
    let mut wp = w;
    for j in 1..=STIRLING_TERMS {
        let k = 2.0 * j as f64;
        s += BERNOULLI[j - 1] / (wp * (k * (k - 1.0)));
        wp *= w2;
    }
    Ok(s.exp() / acc)
}

const ZETA_N: usize = 20;

/// `Σ_{n>=start} n^{-s}` by Euler–Maclaurin with cut at `ZETA_N`, returning
/// (value, truncation bound, magnitude of summands for roundoff).
fn zeta_tail_from(s: f64, start: usize) -> (f64, f64, f64) {
    let mut head = 0.0;
    let mut mag = 0.0;
    for n in start..ZETA_N {
        let t = (n as f64).powf(-s);
        head += t;
        mag += t.abs();
    }
    let nf = ZETA_N as f64;
    let n_s = nf.powf(-s);
    let mut tail = nf * n_s / (s - 1.0) + 0.5 * n_s;
    mag += tail.abs();
    // B_2j/(2j)! · s(s+1)…(s+2j-2) · N^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut npow = n_s / nf;
    let mut last = 0.0;
    for j in 1..=BERNOULLI.len() {
        let term = BERNOULLI[j - 1] / fact * rising * npow;
        tail += term;
        mag += term.abs();
        last = term.abs();
        let k = 2.0 * j as f64;
        rising *= (s + k - 1.0) * (s + k);
        fact *= (k + 1.0) * (k + 2.0);
        npow /= nf * nf;
        if last < 1e-30 * (head.abs() + tail.abs()) {
            break;
        }
    }
    (head + tail, last, mag)
}

/// Riemann zeta at real `s ≠ 1`.
pub fn zeta_real(s: f64, digits: u32) -> Result<Certified> {
    let _ = digits.min(MAX_DIGITS);
    if s == 1.0 {
        return Err(Error::Pole("zeta at s = 1".into()));
    }
    if s <= -1.0 {
        // ζ(s) = 2^s π^{s-1} sin(πs/2) Γ(1-s) ζ(1-s)
        if s == (s / 2.0).round() * 2.0 {
            return Ok(Certified { value: 0.0, err: 0.0 });
        }
        let z1 = zeta_real(1.0 - s, digits)?;
        let g = gamma_real(1.0 - s, digits)?;
        let f = 2f64.powf(s) * PI.powf(s - 1.0) * (PI * s / 2.0).sin();
        let v = f * g.value * z1.value;
        let err = (f * g.value).abs() * z1.err + (f * z1.value).abs() * g.err + v.abs() * 8.0 * EPS;
        return Ok(Certified { value: v, err });
    }
    let (v, trunc, mag) = zeta_tail_from(s, 1);
    Ok(Certified { value: v, err: trunc + 4.0 * EPS * mag })
}

/// `ζ(s) − 1` for `s > 1`, accurate to relative precision for large `s`.
pub fn zeta_minus_one(s: f64) -> f64 {
    let (v, _, _) = zeta_tail_from(s, 2);
    v
}

/// `ζ(s)` value only.
pub fn zeta(s: f64) -> Result<f64> {
    Ok(zeta_real(s, MAX_DIGITS)?.value)
}

/// Binomial coefficient `C(x, n)` for real `x`.
pub fn binomial_real(x: f64, n: u64) -> f64 {
    let mut c = 1.0;
    for i in 0..n {
        c *= (x - i as f64) / (i as f64 + 1.0);
    }
    c
}
