//! Tuples `(l, m, n, t)` with `l m^k = l² n² + t² d`, `l | d` squarefree and
//! `gcd(m, n t d) = 1`, which label conjugate pairs of primitive ideals whose
//! `k`-th power is principal.

use crate::arith::{self, normalize_half, sqrt_mod_composite, Discriminant, SquarefreeTable};
use crate::classgroup::{power_raw, QuadForm};
use crate::error::{domain, Error, Result};
use crate::heegner::{ideal_class_form, NormBound, PrimitiveIdeal, Rational};
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

/// Largest supported exponent.
pub const MAX_K: u64 = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TorsionTuple {
    pub l: u64,
    pub m: u64,
    pub n: u64,
    pub t: u64,
    pub k: u32,
}

impl TorsionTuple {
    /// `(l m^k − l² n²)/t²` when it is a positive integer.
    pub fn d(&self) -> Option<u64> {
        let lhs = self.l as u128 * (self.m as u128).checked_pow(self.k)?;
        let sq = (self.l as u128 * self.n as u128).pow(2);
        let t2 = (self.t as u128).pow(2);
        if lhs <= sq || (lhs - sq) % t2 != 0 {
            return None;
        }
        u64::try_from((lhs - sq) / t2).ok()
    }

    /// All defining conditions for the given `d`.
    pub fn is_valid_for(&self, d: u64) -> bool {
        let (l, m, n, t) = (self.l, self.m, self.n, self.t);
        l >= 1
            && m >= 1
            && n >= 1
            && t >= 1
            && self.k >= 3
            && self.k % 2 == 1
            && self.d() == Some(d)
            && d % l == 0
            && arith::is_squarefree_trial(l)
            && m.gcd(&n) == 1
            && m.gcd(&t) == 1
            && m.gcd(&d) == 1
    }
}

fn check_k(k: u64) -> Result<()> {
    if k < 3 || k % 2 == 0 {
        return domain(format!("k = {k} must be odd and at least 3"));
    }
    if k > MAX_K {
        return Err(Error::Resource(format!("k = {k} exceeds supported maximum {MAX_K}")));
    }
    Ok(())
}

/// `[lm, l n t⁻¹ + sqrt(-d)]`, with `t⁻¹` the inverse of `t` mod `lm`.
pub fn tuple_to_ideal(tuple: &TorsionTuple, d: Discriminant) -> Result<PrimitiveIdeal> {
    let d = d.get();
    if !tuple.is_valid_for(d) {
        return domain(format!("{tuple:?} does not satisfy l m^k = l² n² + t² d for d = {d}"));
    }
    Ok(tuple_to_ideal_unchecked(tuple, d))
}

pub(crate) fn tuple_to_ideal_unchecked(tuple: &TorsionTuple, d: u64) -> PrimitiveIdeal {
    let big_n = tuple.l * tuple.m;
    let tinv = arith::mod_inverse(tuple.t as i64, big_n).expect("gcd(t, lm) = 1");
    let b = tuple.l as i128 * tuple.n as i128 % big_n as i128 * tinv as i128;
    PrimitiveIdeal::from_residue(d, big_n, b)
}

/// Outcome of [`ideal_to_tuple`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TupleLookup {
    /// The tuple of the conjugate pair containing the ideal.
    Tuple(TorsionTuple),
    /// The `k`-th power of the ideal is not principal.
    NotTorsion,
    /// The ramified principal ideal `(sqrt(-d))`, which has no tuple.
    Ramified,
}

/// Recovers the tuple attached to the conjugate pair of `a` when `a^k` is principal.
pub fn ideal_to_tuple(a: &PrimitiveIdeal, k: u64) -> Result<TupleLookup> {
    check_k(k)?;
    if a.is_unit() {
        return domain("the unit ideal has no tuple");
    }
    let d = a.d;
    if power_raw(ideal_class_form(a), k, d) != QuadForm::identity(d) {
        return Ok(TupleLookup::NotTorsion);
    }
    if a.n == d && a.b == 0 {
        return Ok(TupleLookup::Ramified);
    }
    let l = a.n.gcd(&d);
    let m = a.n / l;
    let conj = a.conjugate();
    for tuple in tuples_for_lm(d, l, m, k as u32)? {
        let img = tuple_to_ideal_unchecked(&tuple, d);
        if img == *a || img == conj {
            return Ok(TupleLookup::Tuple(tuple));
        }
    }
    Err(Error::Integrity(format!("no tuple found for torsion ideal {a:?}")))
}

/// Tuples with the given `(l, m)` by Cornacchia on `x² + d y² = l m^k`.
fn tuples_for_lm(d: u64, l: u64, m: u64, k: u32) -> Result<Vec<TorsionTuple>> {
    if m % 2 == 0 || m.gcd(&d) != 1 || d % l != 0 {
        return Ok(Vec::new());
    }
    let big_m = (m as u128).checked_pow(k).map(|v| v * l as u128);
    let Some(big_m) = big_m.filter(|&v| v < (1u128 << 62)) else {
        return Err(Error::Resource(format!("l m^k = {l}·{m}^{k} exceeds 2^62")));
    };
    let big_m = big_m as u64;
    let mut factors: Vec<(u64, u32)> = arith::factor_trial(l)
        .into_iter()
        .chain(arith::factor_trial(m).into_iter().map(|(p, e)| (p, e * k)))
        .collect();
    factors.sort_unstable();
    let roots = sqrt_mod_composite(-(d as i64), big_m, &factors);
    let bound = (big_m as u128).isqrt();
    let mut out = Vec::new();
    for r in roots {
        let (mut a, mut b) = (big_m as u128, r as u128);
        while b > bound {
            (a, b) = (b, a % b);
        }
        let _ = a;
        let x = b;
        let rest = big_m as u128 - x * x;
        if x == 0 || x % l as u128 != 0 || rest % d as u128 != 0 {
            continue;
        }
        let Some(y) = arith::perfect_sqrt(rest / d as u128) else { continue };
        if y == 0 {
            continue;
        }
        let tuple = TorsionTuple { l, m, n: (x / l as u128) as u64, t: y as u64, k };
        if tuple.is_valid_for(d) && !out.contains(&tuple) {
            out.push(tuple);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// All tuples for `d` with `lm` under the bound, ordered by `(l, m, n, t)`.
pub fn enumerate_tuples(d: Discriminant, k: u64, bound: NormBound) -> Result<Vec<TorsionTuple>> {
    check_k(k)?;
    let d = d.get();
    let max_n = bound.max_norm(d);
    let mut ls = arith::divisors_of(&arith::factor_trial(d));
    ls.sort_unstable();
    let mut out = Vec::new();
    for l in ls {
        let mut m = 1;
        while l * m <= max_n {
            if bound.admits(l * m, d) {
                out.extend(tuples_for_lm(d, l, m, k as u32)?);
            }
            m += 2;
        }
    }
    Ok(out)
}

/// Totals of a global tuple census.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TupleCensus {
    pub count: u64,
    /// `(d, count)` ascending, present when requested.
    pub per_d: Option<Vec<(u64, u64)>>,
}

/// Largest `(Y sqrt(D))^k · numer(Y)²` accepted by the global census.
const OVERFLOW_GUARD: f64 = 1e36;

/// Rough cap on `Σ_m Y m^{k/2-1}`, the number of `t` values the scan visits.
const WORK_LIMIT: f64 = 2e9;

fn census_guard(big_d: u64, y: Rational, k: u64) -> Result<()> {
    let yf = *y.numer() as f64 / *y.denom() as f64;
    let x = (yf * (big_d as f64).sqrt()).powi(k as i32) * (*y.numer() as f64).powi(2);
    if !x.is_finite() || x > OVERFLOW_GUARD || *y.denom() > 1 << 20 || *y.numer() > 1 << 30 {
        return Err(Error::Resource(format!(
            "(Y sqrt(D))^k too large for exact 128-bit census: D={big_d}, Y={y}, k={k}"
        )));
    }
    let m_max = yf * (big_d as f64).sqrt();
    let work = yf.max(1.0) * m_max.powf(k as f64 / 2.0) / k as f64 * (1.0 + m_max.max(1.0).ln());
    if work > WORK_LIMIT {
        return Err(Error::Resource(format!(
            "tuple scan needs about {work:.1e} steps for D={big_d}, Y={y}, k={k}; use the direct method"
        )));
    }
    Ok(())
}

/// Every tuple with `d <= D` and `lm <= Y sqrt(d)`, found by solving for `d`.
/// Results are ordered by `(l, m, t, n)`.
pub fn census_tuples(big_d: u64, y: Rational, k: u64) -> Result<Vec<(u64, TorsionTuple)>> {
    check_k(k)?;
    if big_d < 2 || *y.numer() == 0 {
        return Ok(Vec::new());
    }
    census_guard(big_d, y, k)?;
    let sf = SquarefreeTable::new(big_d);
    let ls = l_values(big_d, y);
    let shards: Vec<Vec<(u64, TorsionTuple)>> = ls
        .par_iter()
        .map(|&l| {
            let mut v = Vec::new();
            scan_l(big_d, y, k as u32, l, &sf, |d, tup| v.push((d, tup)));
            v
        })
        .collect();
    Ok(shards.into_iter().flatten().collect())
}

/// Count of [`census_tuples`], optionally with the per-`d` breakdown.
pub fn tuple_census(big_d: u64, y: Rational, k: u64, per_d: bool) -> Result<TupleCensus> {
    check_k(k)?;
    if big_d < 2 || *y.numer() == 0 {
        return Ok(TupleCensus { count: 0, per_d: per_d.then(Vec::new) });
    }
    census_guard(big_d, y, k)?;
    let sf = SquarefreeTable::new(big_d);
    let ls = l_values(big_d, y);
    if !per_d {
        let count = ls
            .par_iter()
            .map(|&l| {
                let mut c = 0u64;
                scan_l(big_d, y, k as u32, l, &sf, |_, _| c += 1);
                c
            })
            .sum();
        return Ok(TupleCensus { count, per_d: None });
    }
    let mut ds: Vec<u64> = census_tuples(big_d, y, k)?.into_iter().map(|(d, _)| d).collect();
    ds.sort_unstable();
    let mut table: Vec<(u64, u64)> = Vec::new();
    for d in ds {
        match table.last_mut() {
            Some((e, c)) if *e == d => *c += 1,
            _ => table.push((d, 1)),
        }
    }
    Ok(TupleCensus { count: table.iter().map(|x| x.1).sum(), per_d: Some(table) })
}

fn l_values(big_d: u64, y: Rational) -> Vec<u64> {
    let (p, q) = (*y.numer() as u128, *y.denom() as u128);
    let mut out = Vec::new();
    let mut l = 1u64;
    // l² q² <= p² D
    while (l as u128 * q).pow(2) <= p * p * big_d as u128 {
        if arith::is_squarefree_trial(l) {
            out.push(l);
        }
        l += 1;
    }
    out
}

fn scan_l(
    big_d: u64,
    y: Rational,
    k: u32,
    l: u64,
    sf: &SquarefreeTable,
    mut visit: impl FnMut(u64, TorsionTuple),
) {
    let (p, q) = (*y.numer() as u128, *y.denom() as u128);
    let (p2, q2) = (p * p, q * q);
    let dd = big_d as u128;
    let l_u = l as u128;
    let l2 = l_u * l_u;
    let mut m = 1u64;
    while (l_u * m as u128).pow(2) * q2 <= p2 * dd {
        if m.gcd(&l) != 1 {
            m += 2;
            continue;
        }
        let mu = m as u128;
        let a = l_u * mu.pow(k);
        if a <= l2 {
            m += 2;
            continue;
        }
        let m2 = mu * mu;
        let mut t = 1u64;
        loop {
            let tu = t as u128;
            let t2 = tu * tu;
            if t2 * l2 * m2 * q2 > p2 * (a - l2) {
                break;
            }
            if t.gcd(&m) != 1 || t.gcd(&l) != 1 {
                // gcd(t, l) > 1 admits no solutions
                t += 1;
                continue;
            }
            let x = p2 * a - t2 * l2 * m2 * q2;
            let n_max = arith::isqrt(x / (p2 * l2));
            let n_min = if a > t2 * dd {
                arith::ceil_sqrt((a - t2 * dd).div_ceil(l2)).max(1)
            } else {
                1
            };
            if n_min <= n_max {
                let mut check = |n: u128| {
                    let rest = a - l2 * n * n;
                    if rest % t2 != 0 {
                        return;
                    }
                    let d = (rest / t2) as u64;
                    if d % 4 != 2 || d % l != 0 || !sf.get(d) {
                        return;
                    }
                    let n64 = n as u64;
                    if m.gcd(&n64) != 1 || m.gcd(&d) != 1 {
                        return;
                    }
                    visit(d, TorsionTuple { l, m, n: n64, t, k });
                };
                let span = n_max - n_min + 1;
                if t == 1 || span <= 64 {
                    for n in n_min..=n_max {
                        check(n);
                    }
                } else {
                    // n² ≡ A l⁻² mod t²
                    let t2_64 = t2 as u64;
                    let linv = arith::mod_inverse(l as i64, t2_64).expect("gcd(l, t) = 1");
                    let target =
                        arith::mul_mod((a % t2) as u64, arith::mul_mod(linv, linv, t2_64), t2_64);
                    let tf: Vec<(u64, u32)> =
                        arith::factor_trial(t).into_iter().map(|(pp, e)| (pp, 2 * e)).collect();
                    let roots = sqrt_mod_composite(target as i64, t2_64, &tf);
                    let mut ns: Vec<u128> = Vec::new();
                    for r in roots {
                        let r = r as u128;
                        let mut n = n_min + (r + t2 - n_min % t2) % t2;
                        while n <= n_max {
                            ns.push(n);
                            n += t2;
                        }
                    }
                    ns.sort_unstable();
                    for n in ns {
                        check(n);
                    }
                }
            }
            t += 1;
        }
        m += 2;
    }
}

/// Both members of the conjugate pair labelled by a tuple.
pub fn tuple_pair(tuple: &TorsionTuple, d: u64) -> [PrimitiveIdeal; 2] {
    let a = tuple_to_ideal_unchecked(tuple, d);
    [a, a.conjugate()]
}

/// `b` residue `l n t⁻¹ mod lm`, normalized; exposed for diagnostics.
pub fn tuple_residue(tuple: &TorsionTuple) -> i64 {
    let big_n = tuple.l * tuple.m;
    let tinv = arith::mod_inverse(tuple.t as i64, big_n).unwrap_or(0);
    normalize_half(tuple.l as i128 * tuple.n as i128 * tinv as i128, big_n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: u64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    fn tup(l: u64, m: u64, n: u64, t: u64, k: u32) -> TorsionTuple {
        TorsionTuple { l, m, n, t, k }
    }

    #[test]
    fn tuple_to_ideal_examples() {
        let a = tuple_to_ideal(&tup(1, 3, 1, 1, 3), disc(26)).unwrap();
        assert_eq!((a.n, a.b), (3, 1));
        let a = tuple_to_ideal(&tup(1, 3, 5, 1, 3), disc(2)).unwrap();
        assert_eq!((a.n, a.b), (3, -1));
        assert!(tuple_to_ideal(&tup(1, 3, 2, 1, 3), disc(26)).is_err());
    }

    #[test]
    fn even_l_gives_even_norm() {
        for d in arith::sieve_discriminants(2, 2000).unwrap() {
            for t in enumerate_tuples(disc(d), 3, NormBound::ScaledSqrt(Rational::from(10))).unwrap() {
                if t.l % 2 == 0 {
                    assert_eq!(tuple_to_ideal(&t, disc(d)).unwrap().n % 2, 0);
                }
            }
        }
    }

    #[test]
    fn ideal_to_tuple_examples() {
        let a = PrimitiveIdeal::new(26, 3, 1).unwrap();
        assert_eq!(ideal_to_tuple(&a, 3).unwrap(), TupleLookup::Tuple(tup(1, 3, 1, 1, 3)));
        let a = PrimitiveIdeal::new(26, 2, 0).unwrap();
        assert_eq!(ideal_to_tuple(&a, 3).unwrap(), TupleLookup::NotTorsion);
        let a = PrimitiveIdeal::new(26, 26, 0).unwrap();
        assert_eq!(ideal_to_tuple(&a, 3).unwrap(), TupleLookup::Ramified);
        assert!(ideal_to_tuple(&PrimitiveIdeal::unit(26), 3).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let b = NormBound::Abs(6);
        assert_eq!(enumerate_tuples(disc(26), 3, b).unwrap(), vec![tup(1, 3, 1, 1, 3)]);
        assert_eq!(enumerate_tuples(disc(2), 3, NormBound::Abs(3)).unwrap(), vec![tup(1, 3, 5, 1, 3)]);
        assert!(enumerate_tuples(disc(26), 1, b).is_err());
        assert!(enumerate_tuples(disc(26), 4, b).is_err());
    }

    fn brute_tuples(d: u64, k: u32, max_n: u64) -> Vec<TorsionTuple> {
        let mut out = Vec::new();
        for l in 1..=max_n {
            if d % l != 0 {
                continue;
            }
            let mut m = 1;
            while l * m <= max_n {
                let a = l as u128 * (m as u128).pow(k);
                let mut t = 1u128;
                while t * t * (d as u128) < a {
                    let rest = a - t * t * d as u128;
                    if rest % (l as u128 * l as u128) == 0 {
                        if let Some(n) = arith::perfect_sqrt(rest / (l as u128 * l as u128)) {
                            let c = tup(l, m, n as u64, t as u64, k);
                            if n > 0 && c.is_valid_for(d) {
                                out.push(c);
                            }
                        }
                    }
                    t += 1;
                }
                m += 1;
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn cornacchia_matches_brute_force() {
        for d in arith::sieve_discriminants(2, 400).unwrap() {
            for k in [3u32, 5] {
                let max_n = if k == 3 { 60 } else { 25 };
                let got = enumerate_tuples(disc(d), k as u64, NormBound::Abs(max_n)).unwrap();
                assert_eq!(got, brute_tuples(d, k, max_n), "d={d} k={k}");
            }
        }
    }

    #[test]
    fn census_small_examples() {
        assert_eq!(tuple_census(10, Rational::from(1), 3, false).unwrap().count, 0);
        let c = tuple_census(30, Rational::from(2), 3, true).unwrap();
        assert_eq!(c.per_d.unwrap(), vec![(26, 3)]);
        assert_eq!(tuple_census(1, Rational::from(2), 3, false).unwrap().count, 0);
        assert!(matches!(
            tuple_census(1_000_000_000, Rational::from(1000), 9, false),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn global_census_matches_per_d() {
        for (y, k) in [(Rational::new(1, 2), 3u64), (Rational::from(1), 3), (Rational::from(2), 5), (Rational::new(7, 3), 3)] {
            let mut global = census_tuples(600, y, k).unwrap();
            global.sort_unstable();
            let mut per_d = Vec::new();
            for d in arith::sieve_discriminants(1, 600).unwrap() {
                for t in enumerate_tuples(disc(d), k, NormBound::ScaledSqrt(y)).unwrap() {
                    per_d.push((d, t));
                }
            }
            per_d.sort_unstable();
            assert_eq!(global, per_d, "y={y} k={k}");
        }
    }
}
