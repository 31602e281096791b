//! Primitive ideals `[N, b + sqrt(-d)]` of `Z[sqrt(-d)]`, their Heegner points
//! `(b + i sqrt(d))/N`, and the action of `Γ∞\SL2(Z)` on them.

use crate::arith::{self, normalize_half, sqrt_mod_composite, Discriminant, SpfTable};
use crate::classgroup::{reduce_unchecked, QuadForm};
use crate::error::{domain, Result};
use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Positive rational parameter such as the height cut `Y`.
pub type Rational = Ratio<u64>;

/// `[N, b + sqrt(-d)]` with `N | b² + d` and `-N/2 < b <= N/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimitiveIdeal {
    pub d: u64,
    pub n: u64,
    pub b: i64,
}

impl PrimitiveIdeal {
    pub fn new(d: u64, n: u64, b: i64) -> Result<Self> {
        if n == 0 {
            return domain("norm must be positive");
        }
        if (b as i128 * b as i128 + d as i128) % n as i128 != 0 {
            return domain(format!("{n} does not divide {b}² + {d}"));
        }
        if normalize_half(b as i128, n) != b {
            return domain(format!("b = {b} is not in (-{n}/2, {n}/2]"));
        }
        Ok(PrimitiveIdeal { d, n, b })
    }

    /// Normalizes `b` into the half-open range; `N | b² + d` must hold.
    pub fn from_residue(d: u64, n: u64, b: i128) -> Self {
        let b = normalize_half(b, n);
        debug_assert_eq!((b as i128 * b as i128 + d as i128) % n as i128, 0);
        PrimitiveIdeal { d, n, b }
    }

    pub fn unit(d: u64) -> Self {
        PrimitiveIdeal { d, n: 1, b: 0 }
    }

    pub fn is_unit(&self) -> bool {
        self.n == 1
    }

    pub fn conjugate(&self) -> Self {
        PrimitiveIdeal::from_residue(self.d, self.n, -(self.b as i128))
    }

    /// `(b² + d)/N`.
    pub fn cofactor(&self) -> u64 {
        ((self.b as i128 * self.b as i128 + self.d as i128) / self.n as i128) as u64
    }
}

/// Cut on ideal norms: `N <= B` or `N <= Y sqrt(d)`, decided exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormBound {
    Abs(u64),
    ScaledSqrt(Rational),
}

impl NormBound {
    pub fn abs_real(b: f64) -> Self {
        NormBound::Abs(if b < 0.0 { 0 } else { b.floor() as u64 })
    }

    #[inline]
    pub fn admits(&self, n: u64, d: u64) -> bool {
        match *self {
            NormBound::Abs(b) => n <= b,
            NormBound::ScaledSqrt(y) => {
                let (p, q) = (*y.numer() as u128, *y.denom() as u128);
                (n as u128 * q).pow(2) <= p * p * d as u128
            }
        }
    }

    /// Largest admissible norm for discriminant `d`.
    pub fn max_norm(&self, d: u64) -> u64 {
        match *self {
            NormBound::Abs(b) => b,
            NormBound::ScaledSqrt(y) => {
                let (p, q) = (*y.numer() as u128, *y.denom() as u128);
                (arith::isqrt(p * p * d as u128) / q) as u64
            }
        }
    }
}

/// `z = (b + i sqrt(d))/N` with exact carrier and float coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeegnerPoint {
    pub b: i64,
    pub n: u64,
    pub d: u64,
    pub float_re: f64,
    pub float_im: f64,
}

/// Bottom row `(c, e)` of a coset in `Γ∞\SL2(Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CosetElement {
    pub c: i64,
    pub e: i64,
}

impl CosetElement {
    pub fn is_canonical(&self) -> bool {
        self.c.gcd(&self.e) == 1 && (self.c > 0 || (self.c == 0 && self.e == 1))
    }
}

/// All primitive ideals with norm under the bound, ordered by `(N, b)`.
pub fn enumerate_primitive_ideals(d: Discriminant, bound: NormBound) -> Vec<PrimitiveIdeal> {
    enumerate_primitive_ideals_with(d, bound, None)
}

pub fn enumerate_primitive_ideals_with(
    d: Discriminant,
    bound: NormBound,
    spf: Option<&SpfTable>,
) -> Vec<PrimitiveIdeal> {
    let d = d.get();
    let mut out = Vec::new();
    for n in 1..=bound.max_norm(d) {
        if n % 4 == 0 {
            continue;
        }
        if n <= 64 {
            let half = n as i64 / 2;
            for b in (half + 1 - n as i64)..=half {
                if (b as i128 * b as i128 + d as i128) % n as i128 == 0 {
                    out.push(PrimitiveIdeal { d, n, b });
                }
            }
        } else {
            let f = match spf {
                Some(t) => t.factor(n),
                None => arith::factor_trial(n),
            };
            let mut bs: Vec<i64> = sqrt_mod_composite(-(d as i64), n, &f)
                .into_iter()
                .map(|r| normalize_half(r as i128, n))
                .collect();
            bs.sort_unstable();
            out.extend(bs.into_iter().map(|b| PrimitiveIdeal { d, n, b }));
        }
    }
    out
}

pub fn heegner_point(a: &PrimitiveIdeal) -> HeegnerPoint {
    HeegnerPoint {
        b: a.b,
        n: a.n,
        d: a.d,
        float_re: a.b as f64 / a.n as f64,
        float_im: (a.d as f64).sqrt() / a.n as f64,
    }
}

/// Reduced form of the class of `a`: `reduce(N, -2b, (b² + d)/N)`.
pub fn ideal_class_form(a: &PrimitiveIdeal) -> QuadForm {
    reduce_unchecked(QuadForm::new(a.n as i64, -2 * a.b, a.cofactor() as i64))
}

/// Ideal whose Heegner point is the root of the form: `[a, -b/2 + sqrt(-d)]`.
pub fn ideal_of_form(f: &QuadForm, d: u64) -> PrimitiveIdeal {
    PrimitiveIdeal::from_residue(d, f.a as u64, -(f.b as i128) / 2)
}

/// Heegner point of the reduced representative of the class of `a`, which
/// lies in the standard fundamental domain.
pub fn reduce_point_to_f(a: &PrimitiveIdeal) -> (HeegnerPoint, QuadForm) {
    let f = ideal_class_form(a);
    (heegner_point(&ideal_of_form(&f, a.d)), f)
}

/// Whether `Im(γ z_a) >= 1/Y` for the coset with bottom row `(c, e)`.
#[inline]
fn coset_admits(a: &PrimitiveIdeal, c: i64, e: i64, p2n2d: u128, q: u128) -> bool {
    let lin = c as i128 * a.b as i128 + e as i128 * a.n as i128;
    let big_q = (lin * lin) as u128 + (c as i128 * c as i128) as u128 * a.d as u128;
    (big_q * q).checked_mul(big_q * q).is_some_and(|lhs| lhs <= p2n2d)
}

/// Ideal with Heegner point `γ z_a` where `γ` has bottom row `(c, e)`.
pub fn coset_image(a: &PrimitiveIdeal, c: i64, e: i64) -> PrimitiveIdeal {
    let (n, b, cc) = (a.n as i128, a.b as i128, a.cofactor() as i128);
    let (c, e) = (c as i128, e as i128);
    // α e − β c = 1
    let eg = e.extended_gcd(&c);
    let (alpha, beta) = (eg.x * eg.gcd, -eg.y * eg.gcd);
    let n_new = c * c * cc + 2 * b * c * e + e * e * n;
    let b_new = alpha * c * cc + (alpha * e + beta * c) * b + beta * e * n;
    PrimitiveIdeal::from_residue(a.d, n_new as u64, b_new)
}

/// Every coset `γ` with `Im(γ z_a) >= 1/Y`, paired with the ideal of `γ z_a`.
///
/// The test `(cb + eN)² + c²d <= Y N sqrt(d)` is decided by squaring in
/// integers, so ties are included deterministically.
pub fn coset_images(a: &PrimitiveIdeal, y: Rational) -> Vec<(CosetElement, PrimitiveIdeal)> {
    let mut out = Vec::new();
    for_each_coset(a, y, |c, e| {
        out.push((CosetElement { c, e }, coset_image(a, c, e)));
    });
    out
}

/// Number of cosets with `Im(γ z_a) >= 1/Y`.
pub fn coset_count(a: &PrimitiveIdeal, y: Rational) -> u64 {
    let mut k = 0;
    for_each_coset(a, y, |_, _| k += 1);
    k
}

pub fn for_each_coset(a: &PrimitiveIdeal, y: Rational, mut visit: impl FnMut(i64, i64)) {
    let (p, q) = (*y.numer() as u128, *y.denom() as u128);
    if p == 0 {
        return;
    }
    let (n, d) = (a.n as u128, a.d as u128);
    let p2n2d = p * p * n * n * d;
    if coset_admits(a, 0, 1, p2n2d, q) {
        visit(0, 1);
    }
    let yf = p as f64 / q as f64;
    let sqrt_d = (a.d as f64).sqrt();
    let mut c: u128 = 1;
    // c⁴ d q² <= p² N²
    while c.pow(4) * d * q * q <= p * p * n * n {
        let ci = c as i64;
        let r = yf * a.n as f64 * sqrt_d - (c * c) as f64 * a.d as f64;
        let w = r.max(0.0).sqrt() / a.n as f64;
        let center = -(ci as f64) * a.b as f64 / a.n as f64;
        let lo = (center - w).floor() as i64 - 1;
        let hi = (center + w).ceil() as i64 + 1;
        for e in lo..=hi {
            if ci.gcd(&e) == 1 && coset_admits(a, ci, e, p2n2d, q) {
                visit(ci, e);
            }
        }
        c += 1;
    }
}

/// Principal primitive ideals `(u + v sqrt(-d)) ≠ (1)` with `N <= Y sqrt(d)`,
/// as `(u, v, ideal)` with `v >= 1`.
pub fn principal_primitive_ideals(d: u64, y: Rational) -> Vec<(i64, u64, PrimitiveIdeal)> {
    let bound = NormBound::ScaledSqrt(y);
    let max_n = bound.max_norm(d);
    let mut out = Vec::new();
    let mut v = 1u64;
    while v * v * d <= max_n {
        let rest = max_n - v * v * d;
        let umax = rest.isqrt() as i64;
        for u in -umax..=umax {
            if (u.unsigned_abs()).gcd(&v) != 1 {
                continue;
            }
            let n = u.unsigned_abs().pow(2) + v * v * d;
            let vinv = arith::mod_inverse(v as i64, n).expect("gcd(v, N) = 1");
            let b = u as i128 * vinv as i128;
            out.push((u, v, PrimitiveIdeal::from_residue(d, n, b)));
        }
        v += 1;
    }
    out
}

/// `#{principal primitive a ≠ (1) : N a <= Y sqrt(d)}` summed over admissible `d <= D`.
pub fn principal_primitive_count(big_d: u64, y: Rational) -> u64 {
    if big_d < 2 || *y.numer() == 0 {
        return 0;
    }
    // N >= d forces d <= Y²
    let ymax = (*y.numer() as f64 / *y.denom() as f64).powi(2).ceil() as u64 + 1;
    let hi = big_d.min(ymax);
    let Ok(ds) = arith::sieve_discriminants(1, hi.max(1)) else { return 0 };
    ds.into_iter().map(|d| principal_primitive_ideals(d, y).len() as u64).sum()
}
