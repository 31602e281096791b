//! The coset sum `Σ_{γ ∈ Γ∞\Γ} Ψ(Im(γz)^{−1})` at a point of the upper half plane.

use super::kernels::psi_kernel;
use crate::arith::gcd;
use crate::error::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// Evaluated coset sum with its truncation data.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EisensteinSum {
    pub value: f64,
    pub cutoff: f64,
    pub terms: u64,
    pub err: f64,
}

/// Upper bound on the number of cosets with `|cz + d|²/y ≤ x`.
pub(crate) fn shell_count(x: f64, y: f64) -> f64 {
    1.0 + 2.0 * x + (x / y).sqrt()
}

/// Upper bound on `|Ψ(u)|` for `u ≥ 1`.
fn psi_bound(u: f64) -> f64 {
    2.0 * (2.0 * PI * u + 1.0) * (-PI * u).exp()
}

/// Bound on the sum over cosets with `|cz + d|²/y > t`.
fn omitted_bound(t: f64, y: f64) -> f64 {
    let mut s = 0.0;
    let mut j = 0.0;
    loop {
        let term = shell_count(t + j + 1.0, y) * psi_bound(t + j);
        s += term;
        if term < 1e-18 * s.max(1e-300) || term < 1e-300 {
            return s;
        }
        j += 1.0;
    }
}

pub fn eisenstein_kernel_sum(x: f64, y: f64, eps: f64) -> Result<EisensteinSum> {
    if !(y > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("point must lie in the upper half plane, got {x} + {y}i")));
    }
    let x = x - x.round();
    let mut t = 1.0f64;
    while omitted_bound(t, y) > eps / 2.0 {
        t += 1.0;
    }
    let per_term = eps / 2.0 / shell_count(t, y);
    let mut terms = 1u64;
    let (first, mut err) = psi_kernel(1.0 / y, per_term)?;
    let mut sum = first;
    let c_max = (t / y).sqrt().floor() as i64;
    for c in 1..=c_max {
        let cf = c as f64;
        let rest = t * y - cf * cf * y * y;
        if rest < 0.0 {
            continue;
        }
        let r = rest.sqrt();
        let lo = (-cf * x - r).ceil() as i64;
        let hi = (-cf * x + r).floor() as i64;
        for d in lo..=hi {
            if gcd(c as u64, d.unsigned_abs()) != 1 {
                continue;
            }
            let re = cf * x + d as f64;
            let u = (re * re + cf * cf * y * y) / y;
            let (v, e) = psi_kernel(u, per_term)?;
            sum += v;
            err += e;
            terms += 1;
        }
    }
    Ok(EisensteinSum { value: sum, cutoff: t, terms, err: err + omitted_bound(t, y) })
}

/// The deterministic sample points used by the identity check.
pub fn sample_points() -> Vec<(f64, f64)> {
    (0..25)
        .map(|j| {
            let im = 10f64.powf(-3.0 + 6.0 * j as f64 / 24.0);
            let re = -0.5 + ((j as f64 * 0.618_033_988_749_895).fract() - 0.5).abs() * 2.0 * 0.999 + 0.0005;
            (re, im)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_examples() {
        for (x, y) in [(0.0, 1.0), (0.0, 1e3), (0.3, 0.004)] {
            let s = eisenstein_kernel_sum(x, y, 1e-10).unwrap();
            assert!((s.value - 0.5).abs() < 1e-8, "z={x}+{y}i value {}", s.value);
        }
    }

    #[test]
    fn samples_in_strip() {
        for (x, y) in sample_points() {
            assert!(x > -0.5 && x <= 0.5 && (1e-3 - 1e-12..=1e3 + 1e-9).contains(&y));
        }
    }
}
