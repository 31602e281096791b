//! The three-variable Mellin transform of
//! `Φ_{D,Y}(x, y, z) = φ((x^k − y²)/(D z²))·ψ(x z/(Y √(x^k − y²)))`.

use super::kernels::SmoothTestFunction;
use super::quad::{exp_sinh, tanh_sinh};
use super::special::gamma_complex;
use crate::error::{Error, Result};
use num_complex::Complex64;

fn check_k(k: u32) -> Result<()> {
    if k < 3 || k % 2 == 0 {
        return Err(Error::Domain(format!("k must be odd and >= 3, got {k}")));
    }
    Ok(())
}

/// Arguments fed to `φ̂` and `ψ̂`.
pub fn mellin_phi_arguments(alpha: Complex64, beta: Complex64, gamma: Complex64, k: u32) -> (Complex64, Complex64) {
    let kf = k as f64;
    let s_phi = alpha / 2.0 + beta * (kf / 4.0) + gamma * ((kf - 2.0) / 4.0);
    let s_psi = alpha + beta * (kf / 2.0) + gamma * (kf / 2.0);
    (s_phi, s_psi)
}

/// `Γ(β/2)Γ(γ/2 + 1)/Γ((β+γ)/2 + 1)`.
pub fn gamma_factor(beta: Complex64, gamma: Complex64) -> Result<Complex64> {
    let num = gamma_complex(beta / 2.0)? * gamma_complex(gamma / 2.0 + 1.0)?;
    Ok(num / gamma_complex((beta + gamma) / 2.0 + 1.0)?)
}

/// Closed form `Φ̂_{1,1}(α,β,γ) = (1/4)·Γ-factor·φ̂(α/2+kβ/4+(k−2)γ/4)·ψ̂(α+kβ/2+kγ/2)`.
pub fn mellin_phi(
    alpha: Complex64,
    beta: Complex64,
    gamma: Complex64,
    k: u32,
    phi: &SmoothTestFunction,
    psi: &SmoothTestFunction,
) -> Result<Complex64> {
    check_k(k)?;
    let (s_phi, s_psi) = mellin_phi_arguments(alpha, beta, gamma, k);
    Ok(gamma_factor(beta, gamma)? * phi.mellin(s_phi)? * psi.mellin(s_psi)? / 4.0)
}

/// `Φ̂_{D,Y} = D^{α/2+kβ/4+(k−2)γ/4}·Y^{α+kβ/2+kγ/2}·Φ̂_{1,1}`.
#[allow(clippy::too_many_arguments)]
pub fn mellin_phi_scaled(
    big_d: f64,
    y: f64,
    alpha: Complex64,
    beta: Complex64,
    gamma: Complex64,
    k: u32,
    phi: &SmoothTestFunction,
    psi: &SmoothTestFunction,
) -> Result<Complex64> {
    let (s_phi, s_psi) = mellin_phi_arguments(alpha, beta, gamma, k);
    let base = mellin_phi(alpha, beta, gamma, k, phi, psi)?;
    Ok(base * Complex64::from(big_d).powc(s_phi) * Complex64::from(y).powc(s_psi))
}

/// Triple Mellin integral of `Φ_{D,Y}` by nested quadrature, for real exponents.
///
/// Uses `y = x^{k/2} v` with `v ∈ (0, 1)`.
#[allow(clippy::too_many_arguments)]
pub fn mellin_phi_numeric(
    big_d: f64,
    cap_y: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    k: u32,
    phi: &SmoothTestFunction,
    psi: &SmoothTestFunction,
    tol: f64,
) -> Result<(f64, f64)> {
    check_k(k)?;
    let kh = k as f64 / 2.0;
    let err = std::cell::Cell::new(0.0f64);
    let outer = exp_sinh(
        |x| {
            let xk = x.powf(k as f64);
            let mid = tanh_sinh(
                |v| {
                    let w = 1.0 - v * v;
                    let r = xk * w;
                    let sq = r.sqrt();
                    let inner = exp_sinh(
                        |z| phi.eval(r / (big_d * z * z)) * psi.eval(x * z / (cap_y * sq)) * z.powf(gamma - 1.0),
                        0.0,
                        tol,
                    );
                    inner.value * v.powf(beta - 1.0)
                },
                0.0,
                1.0,
                tol,
            );
            err.set(err.get().max(mid.err));
            mid.value * x.powf(alpha - 1.0 + kh * beta)
        },
        0.0,
        tol,
    );
    Ok((outer.value, outer.err + err.get()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gamma_factor_at_one() {
        let g = gamma_factor(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        assert!((g.re - PI / 2.0).abs() < 1e-13, "{g}");
    }

    #[test]
    fn closed_form_gaussian() {
        let g = SmoothTestFunction::gaussian();
        let c = Complex64::new(2.0, 0.0);
        let v = mellin_phi(c, c, c, 3, &g, &g).unwrap();
        // (1/4)(1/2)Γ(3/2)/2·Γ(4)/2
        let expect = 0.25 * 0.5 * (PI.sqrt() / 4.0) * 3.0;
        assert!((v.re - expect).abs() < 1e-13);
        assert!(mellin_phi(c, c, c, 4, &g, &g).is_err());
    }
}
