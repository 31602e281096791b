//! Arithmetic constants built from Euler products.

use super::binom::i_of;
use super::euler::{EulerProductSpec, EulerValue, GenSeries, DEFAULT_CUTOFF};
use super::special::{gamma_real, zeta_real, MAX_DIGITS};
use super::Certified;
use crate::arith::{factor_trial, gcd};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

fn q_over_one_plus_q(cap: f64) -> Result<GenSeries> {
    // 1/(p+1) = q/(1+q)
    let q = GenSeries::mono(1.0, 1.0, cap);
    Ok(q.inv1p()?.mul(&q))
}

/// `∏_p (1 − 1/(p(p+1)))`.
pub fn artin_like_spec() -> EulerProductSpec {
    EulerProductSpec::new(
        |p| -1.0 / (p * (p + 1.0)),
        |cap| Ok(q_over_one_plus_q(cap)?.mul(&GenSeries::mono(1.0, -1.0, cap))),
        false,
    )
}

/// Odd-prime product `∏ (1 − (p^{1/3} + 1)/(p² + p))`.
pub fn c56_odd_spec() -> EulerProductSpec {
    EulerProductSpec::new(
        |p| -(p.cbrt() + 1.0) / (p * p + p),
        |cap| {
            let num = GenSeries::mono(2.0 / 3.0, -1.0, cap).add(&GenSeries::mono(1.0, -1.0, cap));
            Ok(q_over_one_plus_q(cap)?.mul(&num))
        },
        true,
    )
}

/// Odd-prime product `∏ [1 + (p^{−1/k} − p^{−(1−2/k)} − p^{−(1−1/k)} − p^{−1})/(p+1)]`.
pub fn c1k_odd_spec(k: u64) -> EulerProductSpec {
    let kf = k as f64;
    EulerProductSpec::new(
        move |p| (p.powf(-1.0 / kf) - p.powf(-(1.0 - 2.0 / kf)) - p.powf(-(1.0 - 1.0 / kf)) - 1.0 / p) / (p + 1.0),
        move |cap| {
            let num = GenSeries::mono(1.0 / kf, 1.0, cap)
                .add(&GenSeries::mono(1.0 - 2.0 / kf, -1.0, cap))
                .add(&GenSeries::mono(1.0 - 1.0 / kf, -1.0, cap))
                .add(&GenSeries::mono(1.0, -1.0, cap));
            Ok(q_over_one_plus_q(cap)?.mul(&num))
        },
        true,
    )
}

/// Odd-prime product `∏ (1 − p^{−1−2s}/(1 + p^{−1} − p^{−2}))` from `G(s) = F(s)/ζ(s)`.
pub fn g_odd_spec(s: f64) -> EulerProductSpec {
    EulerProductSpec::new(
        move |p| -p.powf(-1.0 - 2.0 * s) / (1.0 + 1.0 / p - 1.0 / (p * p)),
        move |cap| {
            let den = GenSeries::mono(1.0, 1.0, cap).add(&GenSeries::mono(2.0, -1.0, cap));
            Ok(den.inv1p()?.mul(&GenSeries::mono(1.0 + 2.0 * s, -1.0, cap)))
        },
        true,
    )
}

fn eval_cut(spec: EulerProductSpec, cutoff: u64) -> Result<EulerValue> {
    spec.with_cutoff(cutoff).evaluate()
}

fn product(parts: &[Certified]) -> Certified {
    let value: f64 = parts.iter().map(|c| c.value).product();
    let rel: f64 = parts.iter().map(|c| if c.value == 0.0 { 0.0 } else { c.err / c.value.abs() }).sum();
    Certified { value, err: value.abs() * (rel + 4.0 * f64::EPSILON * parts.len() as f64) }
}

fn exact(v: f64) -> Certified {
    Certified { value: v, err: v.abs() * f64::EPSILON }
}

/// `A = ∏_p (1 − 1/(p(p+1)))`.
pub fn artin_like(cutoff: u64) -> Result<Certified> {
    Ok(eval_cut(artin_like_spec(), cutoff)?.certified())
}

/// `c₂(l, t)`: 4 for `l` even, 4/5 for `l, t` odd, 4/3 for `t` even.
pub fn c2(l: u64, t: u64) -> Result<f64> {
    if gcd(l, t) != 1 {
        return Err(Error::Domain(format!("c2 needs gcd(l, t) = 1, got ({l}, {t})")));
    }
    Ok(if l % 2 == 0 {
        4.0
    } else if t % 2 == 1 {
        0.8
    } else {
        4.0 / 3.0
    })
}

/// `C(l,t) = c₂(l,t)·(6/π²)·A·∏_{p|l} p²/(p²+p−1)·∏_{p|t} (p²−1)/(p²+p−1)`.
pub fn local_constant_c(l: u64, t: u64, cutoff: u64) -> Result<Certified> {
    if l == 0 || t == 0 {
        return Err(Error::Domain("l and t must be positive".into()));
    }
    let c = c2(l, t)?;
    if factor_trial(l).iter().any(|&(_, e)| e > 1) {
        return Err(Error::Domain(format!("l = {l} is not squarefree")));
    }
    let mut f = c * 6.0 / (PI * PI);
    for (p, _) in factor_trial(l) {
        let p = p as f64;
        f *= p * p / (p * p + p - 1.0);
    }
    for (p, _) in factor_trial(t) {
        let p = p as f64;
        f *= (p * p - 1.0) / (p * p + p - 1.0);
    }
    Ok(product(&[exact(f), artin_like(cutoff)?]))
}

/// `F(s) = ζ(s)·(24/(5π²))·A·[1 + 2/2^s − 2/2^{2s}]·∏_{p odd}(1 − p^{−1−2s}/(1 + p^{−1} − p^{−2}))`.
pub fn f_of(s: f64, cutoff: u64) -> Result<Certified> {
    if s <= 0.0 || s == 1.0 {
        return Err(Error::Domain(format!("F(s) needs s > 0, s ≠ 1, got {s}")));
    }
    let z = zeta_real(s, MAX_DIGITS)?;
    let two = 1.0 + 2.0 * 2f64.powf(-s) - 2.0 * 2f64.powf(-2.0 * s);
    let g = eval_cut(g_odd_spec(s), cutoff)?.certified();
    Ok(product(&[z, exact(24.0 / (5.0 * PI * PI) * two), artin_like(cutoff)?, g]))
}

/// `F(1/3)` through its second displayed form
/// `(4/π²)ζ(1/3)[1 − 2^{1/3} + 2^{2/3}]∏_{p odd}(1 − (p^{1/3}+1)/(p²+p))`.
pub fn f_one_third(cutoff: u64) -> Result<Certified> {
    let z = zeta_real(1.0 / 3.0, MAX_DIGITS)?;
    let two = 1.0 - 2f64.cbrt() + 2f64.cbrt().powi(2);
    let odd = eval_cut(c56_odd_spec(), cutoff)?.certified();
    Ok(product(&[exact(4.0 / (PI * PI) * two), z, odd]))
}

/// `C_{5/6} = 2ζ(1/3)Γ(1/6)/(5π^{3/2}Γ(2/3))·[1 − 2^{1/3} + 2^{2/3}]·∏_{p odd}(1 − (p^{1/3}+1)/(p²+p))`.
pub fn c56(cutoff: u64) -> Result<Certified> {
    let z = zeta_real(1.0 / 3.0, MAX_DIGITS)?;
    let g16 = gamma_real(1.0 / 6.0, MAX_DIGITS)?;
    let g23 = gamma_real(2.0 / 3.0, MAX_DIGITS)?;
    let inv_g23 = Certified { value: 1.0 / g23.value, err: g23.err / (g23.value * g23.value) };
    let two = 1.0 - 2f64.cbrt() + 2f64.cbrt().powi(2);
    let odd = eval_cut(c56_odd_spec(), cutoff)?.certified();
    Ok(product(&[exact(2.0 * two / (5.0 * PI.powf(1.5))), z, g16, inv_g23, odd]))
}

/// `C_{1,k} = (1/(6k))·ζ(1−2/k)/ζ(2)·Γ(1/2)Γ(1/2−1/k)/Γ(1−1/k)·[1 − 2^{1/k} + 2^{1−1/k}]·∏_{p odd}[…]`.
pub fn c1k(k: u64, cutoff: u64) -> Result<Certified> {
    if k < 3 || k % 2 == 0 {
        return Err(Error::Domain(format!("C_(1,k) needs odd k >= 3, got {k}")));
    }
    let kf = k as f64;
    let z = zeta_real(1.0 - 2.0 / kf, MAX_DIGITS)?;
    let ga = gamma_real(0.5 - 1.0 / kf, MAX_DIGITS)?;
    let gb = gamma_real(1.0 - 1.0 / kf, MAX_DIGITS)?;
    let inv_gb = Certified { value: 1.0 / gb.value, err: gb.err / (gb.value * gb.value) };
    let two = 1.0 - 2f64.powf(1.0 / kf) + 2f64.powf(1.0 - 1.0 / kf);
    let lead = 1.0 / (6.0 * kf) / (PI * PI / 6.0) * PI.sqrt() * two;
    let odd = eval_cut(c1k_odd_spec(k), cutoff)?.certified();
    Ok(product(&[exact(lead), z, ga, inv_gb, odd]))
}

/// The two secondary-term constants.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SecondaryConstants {
    pub c56: Certified,
    pub c1k: Certified,
}

pub fn secondary_constants(k: u64, cutoff: u64) -> Result<SecondaryConstants> {
    Ok(SecondaryConstants { c56: c56(cutoff)?, c1k: c1k(k, cutoff)? })
}

/// One entry of the exportable constants report.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantEntry {
    pub name: String,
    pub value: f64,
    pub err: f64,
    pub formula: String,
}

/// Every constant used by the models, with formulas.
pub fn constants_report(cutoff: u64) -> Result<Vec<ConstantEntry>> {
    let mut out = Vec::new();
    let mut push = |name: &str, c: Certified, formula: &str| {
        out.push(ConstantEntry { name: name.into(), value: c.value, err: c.err, formula: formula.into() });
    };
    push("A", artin_like(cutoff)?, "prod_p (1 - 1/(p(p+1)))");
    push("C(1,1)", local_constant_c(1, 1, cutoff)?, "(4/5)(6/pi^2) A");
    push("zeta(1/3)", zeta_real(1.0 / 3.0, MAX_DIGITS)?, "Euler-Maclaurin");
    push("Gamma(1/6)", gamma_real(1.0 / 6.0, MAX_DIGITS)?, "Stirling with shift");
    let i23 = i_of(Complex64::new(2.0 / 3.0, 0.0))?.re;
    push("I(2/3)", exact(i23), "(sqrt(pi)/2) Gamma(s-1/2)/((3/2-s) Gamma(s))");
    push("F(1/3)", f_of(1.0 / 3.0, cutoff)?, "zeta(s) G(s)");
    push(
        "C_5/6",
        c56(cutoff)?,
        "2 zeta(1/3) Gamma(1/6)/(5 pi^(3/2) Gamma(2/3)) [1 - 2^(1/3) + 2^(2/3)] prod_(p odd)(1 - (p^(1/3)+1)/(p^2+p))",
    );
    for k in [3, 5, 7, 9] {
        push(
            &format!("C_1,{k}"),
            c1k(k, cutoff)?,
            "(1/(6k)) zeta(1-2/k)/zeta(2) Gamma(1/2)Gamma(1/2-1/k)/Gamma(1-1/k) [1 - 2^(1/k) + 2^(1-1/k)] prod_(p odd)[...]",
        );
    }
    Ok(out)
}

pub fn default_cutoff() -> u64 {
    DEFAULT_CUTOFF
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUT: u64 = DEFAULT_CUTOFF;

    #[test]
    fn artin_like_value() {
        let a = artin_like(CUT).unwrap();
        assert!((a.value - 0.7044422009991656).abs() < 1e-12, "{a:?}");
        assert!(a.err < 1e-10);
    }

    #[test]
    fn c_one_one() {
        let c = local_constant_c(1, 1, CUT).unwrap();
        assert!((c.value - 0.34259960454167555).abs() < 1e-12);
        assert_eq!(c2(2, 1).unwrap(), 4.0);
        assert_eq!(c2(1, 2).unwrap(), 4.0 / 3.0);
        assert!(local_constant_c(2, 4, CUT).is_err());
    }

    #[test]
    fn secondary_values() {
        let c = c56(CUT).unwrap();
        assert!((c.value + 0.2336972786263727).abs() < 1e-10, "{c:?}");
        let expect = [(3, -0.19474773218864394), (5, -0.3591828408141973), (7, -0.5129720695633539), (9, -0.6627861281098307)];
        for (k, v) in expect {
            let c = c1k(k, CUT).unwrap();
            assert!((c.value - v).abs() < 1e-9, "k={k} {c:?}");
            assert!(c.value < 0.0);
        }
        let f = f_of(1.0 / 3.0, CUT).unwrap();
        assert!((f.value + 0.3207505078724003).abs() < 1e-10, "{f:?}");
    }

    #[test]
    fn f_domain() {
        assert!(f_of(0.0, CUT).is_err());
        assert!(f_of(1.0, CUT).is_err());
    }
}
