//! Positive definite binary quadratic forms of discriminant `-4d`: reduction,
//! composition and the structure of the class group.

use crate::arith::{factor_trial, Discriminant, SpfTable};
use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};

/// Largest `d` for which composition stays inside `i64`.
pub const MAX_D: u64 = 1_000_000_000;

/// `a x² + b xy + c y²`; canonical ordering is lexicographic in `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    pub fn disc(&self) -> i128 {
        (self.b as i128).pow(2) - 4 * self.a as i128 * self.c as i128
    }

    pub fn identity(d: u64) -> Self {
        QuadForm::new(1, 0, d as i64)
    }

    pub fn is_reduced(&self) -> bool {
        let QuadForm { a, b, c } = *self;
        b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    /// Inverse class representative, already reduced when `self` is.
    pub fn inverse(&self) -> Self {
        let f = QuadForm::new(self.a, -self.b, self.c);
        if f.is_reduced() {
            f
        } else {
            reduce_unchecked(f)
        }
    }

    /// `b = 0`, `a = b` or `a = c`.
    pub fn is_ambiguous(&self) -> bool {
        self.b == 0 || self.a == self.b || self.a == self.c
    }
}

/// Reduced representative: `|b| <= a <= c`, `b >= 0` when `|b| = a` or `a = c`.
pub fn reduce_form(f: QuadForm) -> Result<QuadForm> {
    if f.disc() >= 0 {
        return domain(format!("form {f:?} has non-negative discriminant"));
    }
    if f.a <= 0 {
        return domain(format!("form {f:?} is not positive definite"));
    }
    Ok(reduce_unchecked(f))
}

pub(crate) fn reduce_unchecked(f: QuadForm) -> QuadForm {
    let QuadForm { mut a, mut b, mut c } = f;
    loop {
        if b > a || b <= -a {
            // b ← b + 2ar with b in (-a, a]
            let two_a = 2 * a;
            let mut r = (a - b).div_euclid(two_a);
            let nb = b + r * two_a;
            if nb <= -a {
                r += 1;
            }
            let nb = b + r * two_a;
            // c ← a r² + b r + c
            c = ((a as i128 * r as i128 + b as i128) * r as i128 + c as i128) as i64;
            b = nb;
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        break;
    }
    if b < 0 && (a == c || -b == a) {
        b = -b;
    }
    QuadForm { a, b, c }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    let t = if b != 0 { (old_r - old_s * a) / b } else { 0 };
    if old_r < 0 {
        (-old_s, -t, -old_r)
    } else {
        (old_s, t, old_r)
    }
}

/// Gauss composition (Cohen, Algorithm 5.4.7) followed by reduction.
pub fn compose_classes(f: QuadForm, g: QuadForm, d: Discriminant) -> Result<QuadForm> {
    let disc = -4 * d.get() as i128;
    if f.disc() != disc || g.disc() != disc {
        return domain(format!("forms {f:?}, {g:?} do not have discriminant {disc}"));
    }
    if d.get() > MAX_D {
        return Err(Error::Range(format!("d = {} exceeds {MAX_D}", d.get())));
    }
    Ok(compose_raw(f, g, d.get()))
}

/// Composition without validation, for forms known to share discriminant `-4d`.
pub fn compose_raw(f: QuadForm, g: QuadForm, d: u64) -> QuadForm {
    let (f1, f2) = if f.a > g.a { (g, f) } else { (f, g) };
    let (a1, b1) = (f1.a, f1.b);
    let (a2, b2, c2) = (f2.a, f2.b, f2.c);
    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (y1, dd) = if a2 % a1 == 0 {
        (0, a1)
    } else {
        let (u, _, g) = ext_gcd(a2, a1);
        (u, g)
    };
    let (x2, y2, d1) = if s % dd == 0 {
        (0, -1, dd)
    } else {
        let (u, v, g) = ext_gcd(s, dd);
        (u, -v, g)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = ((y1 as i128 * y2 as i128 % v1 as i128 * n as i128 - x2 as i128 * c2 as i128)
        .rem_euclid(v1 as i128)) as i64;
    let b3 = b2 as i128 + 2 * v2 as i128 * r as i128;
    let a3 = v1 as i128 * v2 as i128;
    let c3 = (b3 * b3 + 4 * d as i128) / (4 * a3);
    reduce_unchecked(QuadForm { a: a3 as i64, b: b3 as i64, c: c3 as i64 })
}

/// `f^e` by square-and-multiply.
pub fn power_raw(f: QuadForm, mut e: u64, d: u64) -> QuadForm {
    let mut acc = QuadForm::identity(d);
    let mut base = f;
    while e > 0 {
        if e & 1 == 1 {
            acc = compose_raw(acc, base, d);
        }
        e >>= 1;
        if e > 0 {
            base = compose_raw(base, base, d);
        }
    }
    acc
}

/// All reduced forms of discriminant `-4d`, in canonical order.
pub fn reduced_forms(d: u64, spf: Option<&SpfTable>) -> Vec<QuadForm> {
    let mut out = Vec::new();
    let mut beta = 0u64;
    while 3 * beta * beta <= d {
        let n = beta * beta + d;
        let factors = match spf {
            Some(t) => t.factor(n),
            None => factor_trial(n),
        };
        let lo = (2 * beta).max(1);
        push_divisors_in(&factors, 0, 1, lo, n, &mut |a| {
            let c = n / a;
            let b = 2 * beta as i64;
            out.push(QuadForm::new(a as i64, b, c as i64));
            if beta > 0 && 2 * beta != a && a != c {
                out.push(QuadForm::new(a as i64, -b, c as i64));
            }
        });
        beta += 1;
    }
    out.sort_unstable();
    out
}

// divisors a of n with lo <= a and a² <= n
fn push_divisors_in(
    factors: &[(u64, u32)],
    i: usize,
    acc: u64,
    lo: u64,
    n: u64,
    emit: &mut impl FnMut(u64),
) {
    if acc as u128 * acc as u128 > n as u128 {
        return;
    }
    if i == factors.len() {
        if acc >= lo {
            emit(acc);
        }
        return;
    }
    let (p, e) = factors[i];
    let mut x = acc;
    for k in 0..=e {
        push_divisors_in(factors, i + 1, x, lo, n, emit);
        if k < e {
            x *= p;
            if x as u128 * x as u128 > n as u128 {
                break;
            }
        }
    }
}

/// Reduced forms with power maps `x ↦ x^p` for selected primes.
#[derive(Clone, Debug)]
pub struct GroupTable {
    pub d: u64,
    pub forms: Vec<QuadForm>,
    maps: Vec<(u64, Vec<u32>)>,
}

impl GroupTable {
    pub fn new(d: u64, forms: Vec<QuadForm>) -> Self {
        GroupTable { d, forms, maps: Vec::new() }
    }

    pub fn h(&self) -> u64 {
        self.forms.len() as u64
    }

    pub fn index_of(&self, f: &QuadForm) -> Option<usize> {
        self.forms.binary_search_by(|g| (g.a, g.b).cmp(&(f.a, f.b))).ok()
    }

    /// Builds the `p`-th power map if not present.
    pub fn ensure_map(&mut self, p: u64) {
        if self.maps.iter().any(|(q, _)| *q == p) {
            return;
        }
        let d = self.d;
        let map = self
            .forms
            .iter()
            .map(|&f| {
                let g = power_raw(f, p, d);
                self.index_of(&g).expect("power of a reduced form is in the table") as u32
            })
            .collect();
        self.maps.push((p, map));
    }

    pub fn map(&self, p: u64) -> Option<&[u32]> {
        self.maps.iter().find(|(q, _)| *q == p).map(|(_, m)| m.as_slice())
    }

    /// Index of `forms[i]^k`; every prime factor of `gcd(k, h)` must have a map.
    pub fn pow_index(&self, mut i: usize, k: u64) -> usize {
        let h = self.h();
        for (p, e) in factor_trial(k) {
            if h % p != 0 {
                // x ↦ x^p permutes a group of order prime to p; only order matters here
                continue;
            }
            let m = self.map(p).expect("power map present");
            for _ in 0..e {
                i = m[i] as usize;
            }
        }
        i
    }

    /// Whether `forms[i]^k` is the identity.
    pub fn order_divides(&self, i: usize, k: u64) -> bool {
        let kk = num_integer::gcd(k, self.h());
        self.pow_index(i, kk) == 0
    }

    /// Indices of elements of order exactly `k` (odd `k`).
    pub fn exact_order_indices(&mut self, k: u64) -> Vec<usize> {
        if k == 0 || self.h() % k != 0 {
            return Vec::new();
        }
        let primes: Vec<u64> = factor_trial(k).into_iter().map(|(p, _)| p).collect();
        for &p in &primes {
            self.ensure_map(p);
        }
        (0..self.forms.len())
            .filter(|&i| {
                self.order_divides(i, k) && primes.iter().all(|&p| !self.order_divides(i, k / p))
            })
            .collect()
    }

    /// `#{x : x^k = 1}` for odd `k`.
    pub fn count_dividing(&mut self, k: u64) -> u64 {
        let kk = num_integer::gcd(k, self.h());
        if kk == 1 {
            return 1;
        }
        for (p, _) in factor_trial(kk) {
            self.ensure_map(p);
        }
        (0..self.forms.len()).filter(|&i| self.pow_index(i, kk) == 0).count() as u64
    }
}

/// The class group `H(-d)` with element orders and invariant factors.
#[derive(Clone, Debug, Serialize)]
pub struct ClassGroup {
    pub d: u64,
    pub h: u64,
    pub reduced_forms: Vec<QuadForm>,
    /// `order_of[i]` is the order of `reduced_forms[i]`.
    pub order_of: Vec<u64>,
    /// Invariant factors `n_1 | n_2 | …`, all `> 1`; empty for the trivial group.
    pub structure: Vec<u64>,
}

impl ClassGroup {
    pub fn order(&self, f: &QuadForm) -> Option<u64> {
        let i = self.reduced_forms.binary_search_by(|g| (g.a, g.b).cmp(&(f.a, f.b))).ok()?;
        Some(self.order_of[i])
    }
}

pub fn class_group_of(d: Discriminant) -> ClassGroup {
    class_group_with(d, None)
}

pub fn class_group_with(d: Discriminant, spf: Option<&SpfTable>) -> ClassGroup {
    let dv = d.get();
    let mut table = GroupTable::new(dv, reduced_forms(dv, spf));
    let h = table.h();
    let hf = factor_trial(h);
    let n = h as usize;
    let mut order_of = vec![1u64; n];
    let mut per_prime_exponents: Vec<(u64, Vec<u32>)> = Vec::new();
    for &(p, v) in &hf {
        table.ensure_map(p);
        let m = table.map(p).unwrap().to_vec();
        // the image of x ↦ x^(p^v) is the prime-to-p part
        let mut img = (0..n).collect::<Vec<usize>>();
        for _ in 0..v {
            for x in img.iter_mut() {
                *x = m[*x] as usize;
            }
        }
        let mut coprime = vec![false; n];
        for &x in &img {
            coprime[x] = true;
        }
        let mut counts = vec![0u64; v as usize + 1];
        for (i, ord) in order_of.iter_mut().enumerate() {
            let mut x = i;
            let mut e = 0u32;
            while !coprime[x] {
                x = m[x] as usize;
                e += 1;
            }
            *ord *= p.pow(e);
            counts[e as usize] += 1;
        }
        // N_j = #{x : p-part of order divides p^j}
        let mut nj = Vec::with_capacity(v as usize + 1);
        let mut acc = 0u64;
        for c in &counts {
            acc += c;
            nj.push(acc);
        }
        // r_j = number of cyclic p-factors of order >= p^j
        let mut rj = Vec::new();
        for j in 1..nj.len() {
            let ratio = nj[j] / nj[j - 1];
            let mut r = 0u32;
            let mut t = 1u64;
            while t < ratio {
                t *= p;
                r += 1;
            }
            rj.push(r);
        }
        let mut exps = Vec::new();
        let maxr = rj.first().copied().unwrap_or(0);
        for i in 0..maxr {
            let e = rj.iter().filter(|&&r| r > i).count() as u32;
            exps.push(e);
        }
        per_prime_exponents.push((p, exps));
    }
    let width = per_prime_exponents.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    let mut structure = vec![1u64; width];
    for (p, exps) in &per_prime_exponents {
        // exps are descending; the largest goes on the last invariant factor
        for (i, &e) in exps.iter().enumerate() {
            structure[width - 1 - i] *= p.pow(e);
        }
    }
    ClassGroup { d: dv, h, reduced_forms: table.forms, order_of, structure }
}

/// Classes of order exactly `k` (`exact`), or of order dividing `k` other
/// than the identity.
pub fn torsion_classes(g: &ClassGroup, k: u64, exact: bool) -> Result<Vec<QuadForm>> {
    if k % 2 == 0 {
        return domain(format!("k = {k} must be odd"));
    }
    Ok(g.reduced_forms
        .iter()
        .zip(&g.order_of)
        .filter(|(_, &o)| if exact { o == k } else { o > 1 && k % o == 0 })
        .map(|(f, _)| *f)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: u64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce_form(QuadForm::new(3, 2, 9)).unwrap(), QuadForm::new(3, 2, 9));
        assert_eq!(reduce_form(QuadForm::new(10, -4, 3)).unwrap(), QuadForm::new(3, -2, 9));
        for d in [2u64, 6, 26, 1002] {
            let f = QuadForm::identity(d);
            assert_eq!(reduce_form(f).unwrap(), f);
        }
        assert!(reduce_form(QuadForm::new(1, 3, 1)).is_err());
        assert!(reduce_form(QuadForm::new(-1, 0, -2)).is_err());
    }

    #[test]
    fn composition_examples() {
        let d = disc(26);
        let f = QuadForm::new(3, 2, 9);
        assert_eq!(compose_classes(f, f, d).unwrap(), QuadForm::new(3, -2, 9));
        for g in reduced_forms(26, None) {
            assert_eq!(compose_classes(QuadForm::identity(26), g, d).unwrap(), g);
            assert_eq!(compose_classes(g, g.inverse(), d).unwrap(), QuadForm::identity(26));
        }
        assert!(compose_classes(f, QuadForm::identity(6), d).is_err());
    }

    #[test]
    fn small_class_groups() {
        let g = class_group_of(disc(2));
        assert_eq!(g.h, 1);
        assert_eq!(g.reduced_forms, vec![QuadForm::new(1, 0, 2)]);
        assert!(g.structure.is_empty());
        let g = class_group_of(disc(6));
        assert_eq!(g.reduced_forms, vec![QuadForm::new(1, 0, 6), QuadForm::new(2, 0, 3)]);
        let g = class_group_of(disc(26));
        assert_eq!(g.h, 6);
        assert_eq!(g.structure, vec![6]);
        let want = [
            ((1, 0, 26), 1),
            ((2, 0, 13), 2),
            ((3, -2, 9), 3),
            ((3, 2, 9), 3),
            ((5, -4, 6), 6),
            ((5, 4, 6), 6),
        ];
        for ((a, b, c), o) in want {
            assert_eq!(g.order(&QuadForm::new(a, b, c)), Some(o));
        }
    }

    #[test]
    fn torsion_class_examples() {
        let g = class_group_of(disc(26));
        let mut t3 = torsion_classes(&g, 3, true).unwrap();
        t3.sort();
        assert_eq!(t3, vec![QuadForm::new(3, -2, 9), QuadForm::new(3, 2, 9)]);
        assert!(torsion_classes(&g, 9, true).unwrap().is_empty());
        assert_eq!(torsion_classes(&g, 9, false).unwrap().len(), 2);
        assert!(torsion_classes(&class_group_of(disc(2)), 3, true).unwrap().is_empty());
        assert!(torsion_classes(&g, 4, true).is_err());
    }

    #[test]
    fn group_table_counts_match_full_orders() {
        for d in crate::arith::sieve_discriminants(2, 3000).unwrap() {
            let g = class_group_of(disc(d));
            let mut t = GroupTable::new(d, g.reduced_forms.clone());
            for k in [3u64, 5, 7, 9, 15] {
                let exact: Vec<usize> = t.exact_order_indices(k);
                let want: Vec<usize> = (0..g.order_of.len()).filter(|&i| g.order_of[i] == k).collect();
                assert_eq!(exact, want, "d={d} k={k}");
                let dividing = g.order_of.iter().filter(|&&o| k % o == 0).count() as u64;
                assert_eq!(t.count_dividing(k), dividing, "d={d} k={k}");
            }
        }
    }
}
