//! Smoothing kernels and their Mellin transforms.

use super::quad::{exp_sinh_c, tanh_sinh_c};
use super::special::{gamma_complex, zeta};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type MellinFn = Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>;

/// Which family a kernel belongs to.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelKind {
    /// `exp(1 − 1/(1 − u²))` with `u = (x − center)/half_width`.
    Bump { center: f64, half_width: f64 },
    /// Indicator of `[0, 1]`.
    Sharp,
    /// `exp(−x²)`.
    Gaussian,
    /// `Ψ(y) = Σ_{m≥1} Ψ₀(m²y)`, `Ψ₀(y) = (2πy − 1)e^{−πy}`.
    EisensteinPsi,
    Custom { name: String },
}

/// A test function on the positive reals together with its Mellin transform.
#[derive(Clone)]
pub struct SmoothTestFunction {
    pub kind: KernelKind,
    eval: EvalFn,
    mellin: Option<MellinFn>,
    support: (f64, f64),
    residue: f64,
}

impl fmt::Debug for SmoothTestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothTestFunction").field("kind", &self.kind).field("support", &self.support).finish()
    }
}

const QUAD_TOL: f64 = 1e-13;
const PSI_EPS: f64 = 1e-15;

impl SmoothTestFunction {
    pub fn bump(center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && center - half_width >= 0.0) {
            return Err(Error::Domain(format!("bump needs support inside [0, ∞), got center {center}, half width {half_width}")));
        }
        let eval: EvalFn = Arc::new(move |x| {
            let u = (x - center) / half_width;
            if u.abs() >= 1.0 {
                0.0
            } else {
                (1.0 - 1.0 / (1.0 - u * u)).exp()
            }
        });
        Ok(Self {
            kind: KernelKind::Bump { center, half_width },
            eval,
            mellin: None,
            support: (center - half_width, center + half_width),
            residue: 0.0,
        })
    }

    /// Bump supported on `[lo, hi]`.
    pub fn bump_on(lo: f64, hi: f64) -> Result<Self> {
        Self::bump(0.5 * (lo + hi), 0.5 * (hi - lo))
    }

    pub fn sharp() -> Self {
        Self {
            kind: KernelKind::Sharp,
            eval: Arc::new(|x| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 }),
            mellin: Some(Arc::new(|s: Complex64| {
                if s.norm() == 0.0 {
                    Err(Error::Pole("Mellin transform of the sharp cutoff at 0".into()))
                } else {
                    Ok(s.inv())
                }
            })),
            support: (0.0, 1.0),
            residue: 1.0,
        }
    }

    pub fn gaussian() -> Self {
        Self {
            kind: KernelKind::Gaussian,
            eval: Arc::new(|x| (-x * x).exp()),
            mellin: Some(Arc::new(|s: Complex64| Ok(gamma_complex(s / 2.0)? / 2.0))),
            support: (0.0, f64::INFINITY),
            residue: 1.0,
        }
    }

    pub fn eisenstein_psi() -> Self {
        Self {
            kind: KernelKind::EisensteinPsi,
            eval: Arc::new(|y| psi_kernel(y, PSI_EPS).map(|v| v.0).unwrap_or(0.0)),
            mellin: Some(Arc::new(mellin_psi)),
            support: (0.0, f64::INFINITY),
            residue: 0.5,
        }
    }

    /// A user-supplied kernel; its Mellin transform is computed by quadrature.
    pub fn custom(
        name: &str,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: (f64, f64),
        residue_at_zero: f64,
    ) -> Self {
        Self {
            kind: KernelKind::Custom { name: name.into() },
            eval: Arc::new(f),
            mellin: None,
            support,
            residue: residue_at_zero,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn has_compact_support(&self) -> bool {
        self.support.1.is_finite()
    }

    /// `Res_{s=0}` of the Mellin transform, which equals the value at `0⁺`.
    pub fn residue_at_zero(&self) -> f64 {
        self.residue
    }

    /// Only the Eisenstein-dual Ψ and the sharp cutoff are admissible for secondary-term
    /// predictions; others are main-term only.
    pub fn secondary_admissible(&self) -> bool {
        matches!(self.kind, KernelKind::EisensteinPsi | KernelKind::Sharp)
    }

    /// `∫_0^∞ f(x) x^{s−1} dx`.
    pub fn mellin(&self, s: Complex64) -> Result<Complex64> {
        if let Some(m) = &self.mellin {
            return m(s);
        }
        Ok(self.mellin_numeric(s)?.0)
    }

    /// Mellin transform by quadrature, with an error estimate.
    pub fn mellin_numeric(&self, s: Complex64) -> Result<(Complex64, f64)> {
        let (lo, hi) = self.support;
        let integrand = |x: f64| Complex64::from(x).powc(s - 1.0) * self.eval(x);
        let r = if hi.is_finite() {
            tanh_sinh_c(integrand, lo, hi, QUAD_TOL)
        } else if lo > 0.0 {
            exp_sinh_c(integrand, lo, QUAD_TOL)
        } else {
            let a = tanh_sinh_c(integrand, 0.0, 1.0, QUAD_TOL);
            let b = exp_sinh_c(integrand, 1.0, QUAD_TOL);
            super::quad::QuadResult { value: a.value + b.value, err: a.err + b.err }
        };
        if !(r.value.re.is_finite() && r.value.im.is_finite()) {
            return Err(Error::Domain(format!("Mellin quadrature diverged at s = {s}")));
        }
        Ok((r.value, r.err))
    }
}

/// `Ψ₀(y) = (2πy − 1)e^{−πy}`.
pub fn psi0(y: f64) -> f64 {
    (2.0 * PI * y - 1.0) * (-PI * y).exp()
}

/// Bound on `Σ_{m>M} |Ψ₀(m²y)|`, valid when `(M+1)²y ≥ 1/(2π)`.
pub fn psi_tail_bound(m: u64, y: f64) -> f64 {
    let m1 = (m + 1) as f64;
    let x = m1 * m1 * y;
    let g = (2.0 * PI * x + 1.0) * (-PI * x).exp();
    g + (-PI * x).exp() * (m1 + 1.0 / (PI * m1 * y))
}

/// Truncation point for `Ψ(y)`: smallest `M` meeting the tail inequality.
pub fn psi_truncation(y: f64, eps: f64) -> u64 {
    // start from the point where π(M+1)²y ≈ log(1/eps) and step down while the bound still holds
    let target = (1.0 / eps.max(1e-300)).ln().max(1.0) + 5.0;
    let mut m = ((target / (PI * y)).sqrt().ceil() as u64).max(1);
    while m > 0 {
        let m1 = m as f64;
        if m1 * m1 * y >= 1.0 / (2.0 * PI) && psi_tail_bound(m - 1, y) <= eps {
            m -= 1;
        } else {
            break;
        }
    }
    while !(((m + 1) as f64).powi(2) * y >= 1.0 / (2.0 * PI) && psi_tail_bound(m, y) <= eps) {
        m += 1;
    }
    m
}

/// `Ψ(y)` and its truncation bound.
pub fn psi_kernel(y: f64, eps: f64) -> Result<(f64, f64)> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("Psi needs y > 0, got {y}")));
    }
    if y < PSI_DUAL_BELOW {
        return Ok(psi_dual(y, eps));
    }
    let m = psi_truncation(y, eps);
    let mut s = 0.0;
    let mut mag = 0.0;
    for j in (1..=m).rev() {
        let t = psi0((j * j) as f64 * y);
        s += t;
        mag += t.abs();
    }
    Ok((s, psi_tail_bound(m, y) + 4.0 * f64::EPSILON * mag))
}

const PSI_DUAL_BELOW: f64 = 1e-4;

/// `Ψ(y) = 1/2 − 2π y^{−3/2} Σ_{m≥1} m² e^{−πm²/y}`, from theta inversion; for small `y`.
fn psi_dual(y: f64, eps: f64) -> (f64, f64) {
    let c = PI / y;
    let scale = 2.0 * PI * y.powf(-1.5);
    let mut s = 0.0;
    let mut m = 1u64;
    loop {
        let a = m as f64;
        // tail Σ_{j≥m} j² e^{−c j²} ≤ e^{−c a²}(a² + a/(2c) + 1/(4c²a))
        let tail = (-c * a * a).exp() * (a * a + a / (2.0 * c) + 1.0 / (4.0 * c * c * a));
        if c * a * a >= 1.0 && scale * tail <= eps {
            return (0.5 - scale * s, scale * tail + 4.0 * f64::EPSILON);
        }
        s += a * a * (-c * a * a).exp();
        m += 1;
    }
}

/// `Ψ̂(s) = (2s − 1)π^{−s}Γ(s)ζ(2s)` for real `s`; at `s = 1/2` the limit is 1.
pub fn mellin_psi(s: Complex64) -> Result<Complex64> {
    if s.im != 0.0 {
        return Err(Error::Domain("the Psi transform is evaluated on the real axis only".into()));
    }
    let x = s.re;
    if (x - 0.5).abs() < 1e-300 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let g = super::special::gamma(x)?;
    let v = (2.0 * x - 1.0) * PI.powf(-x) * g * zeta(2.0 * x)?;
    Ok(Complex64::new(v, 0.0))
}
