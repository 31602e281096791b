//! The binomial-Gamma functions `I(s)` and `J(w, s)`.
//!
//! `I(s) = Σ_n C(1/2, n)(−1)ⁿ / (3/2 − n − s)`, with closed form
//! `(√π/2) Γ(s − 1/2) / ((3/2 − s) Γ(s))`; `J` is its difference quotient.

use super::special::gamma_complex;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const POLE_TOL: f64 = 1e-12;

fn near_real(s: Complex64, x: f64) -> bool {
    (s - x).norm() < POLE_TOL
}

fn check_poles(s: Complex64) -> Result<()> {
    if near_real(s, 1.5) {
        return Err(Error::Pole(format!("I at s = {s}")));
    }
    if s.im.abs() < POLE_TOL && s.re <= 0.5 + POLE_TOL {
        let k = 0.5 - s.re;
        if (k - k.round()).abs() < POLE_TOL {
            return Err(Error::Pole(format!("I at s = {s}")));
        }
    }
    Ok(())
}

fn recip_gamma(s: Complex64) -> Result<Complex64> {
    if s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(gamma_complex(s)?.inv())
}

/// Closed form of `I(s)`.
pub fn i_of(s: Complex64) -> Result<Complex64> {
    check_poles(s)?;
    let num = gamma_complex(s - 0.5)? * (PI.sqrt() / 2.0);
    Ok(num * recip_gamma(s)? / (Complex64::from(1.5) - s))
}

/// `J(w, s) = (I(w) − I(s)) / (w − s)`.
pub fn j_of(w: Complex64, s: Complex64) -> Result<Complex64> {
    check_poles(w)?;
    check_poles(s)?;
    if (w - s).norm() < POLE_TOL {
        return Err(Error::Domain("J requires w ≠ s".into()));
    }
    Ok((i_of(w)? - i_of(s)?) / (w - s))
}

/// Partial sums at `N_j = 64·2^j` combined by Richardson extrapolation with
/// tail exponents `p0, p0 + 1, …`.
fn richardson(term: impl Fn(u64) -> Complex64, p0: f64, levels: usize) -> (Complex64, f64) {
    let mut partial = Vec::with_capacity(levels);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut n = 0u64;
    for j in 0..levels {
        let target = 64u64 << j;
        while n < target {
            acc += term(n);
            n += 1;
        }
        partial.push(acc);
    }
    let mut row = partial;
    let mut last_diff = f64::INFINITY;
    for i in 0..levels - 1 {
        let f = 2f64.powf(p0 + i as f64);
        let next: Vec<Complex64> = row.windows(2).map(|w| (w[1] * f - w[0]) / (f - 1.0)).collect();
        last_diff = (next[next.len() - 1] - row[row.len() - 1]).norm();
        row = next;
    }
    (row[row.len() - 1], last_diff)
}

fn binom_half_signed(n_max: u64) -> Vec<f64> {
    let mut g = Vec::with_capacity(n_max as usize);
    let mut c = 1.0;
    for n in 0..n_max {
        g.push(c);
        c *= (n as f64 - 0.5) / (n as f64 + 1.0);
    }
    g
}

const SERIES_LEVELS: usize = 7;

/// `I(s)` from its defining series; returns the value and an error estimate.
pub fn i_series(s: Complex64) -> Result<(Complex64, f64)> {
    check_poles(s)?;
    let g = binom_half_signed(64 << (SERIES_LEVELS - 1));
    let a = Complex64::from(1.5) - s;
    for n in 0..g.len() {
        if (a - n as f64).norm() < POLE_TOL {
            return Err(Error::Pole(format!("I series at s = {s}")));
        }
    }
    Ok(richardson(|n| g[n as usize] / (a - n as f64), 1.5, SERIES_LEVELS))
}

/// `J(w, s)` from the series `Σ C(1/2, n)(−1)ⁿ / ((3/2 − n − w)(3/2 − n − s))`.
pub fn j_series(w: Complex64, s: Complex64) -> Result<(Complex64, f64)> {
    check_poles(w)?;
    check_poles(s)?;
    let g = binom_half_signed(64 << (SERIES_LEVELS - 1));
    let aw = Complex64::from(1.5) - w;
    let a_s = Complex64::from(1.5) - s;
    Ok(richardson(|n| g[n as usize] / ((aw - n as f64) * (a_s - n as f64)), 2.5, SERIES_LEVELS))
}
