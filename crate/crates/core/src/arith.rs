//! Exact integer utilities: squarefree sieves, prime tables, residue symbols
//! and square roots modulo composite moduli.

use crate::error::{domain, Error, Result};
use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// A squarefree `d ≡ 2 mod 4`; the field discriminant is `-4d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Discriminant(u64);

impl Discriminant {
    pub fn new(d: u64) -> Result<Self> {
        if d % 4 != 2 {
            return domain(format!("d = {d} is not 2 mod 4"));
        }
        if !is_squarefree_trial(d) {
            return domain(format!("d = {d} is not squarefree"));
        }
        Ok(Discriminant(d))
    }

    /// Skips validation; callers must already know `d` is admissible.
    pub fn new_unchecked(d: u64) -> Self {
        debug_assert!(d % 4 == 2);
        Discriminant(d)
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

/// Bit table of squarefree integers in `[0, limit]`.
#[derive(Clone, Debug)]
pub struct SquarefreeTable {
    limit: u64,
    words: Vec<u64>,
}

impl SquarefreeTable {
    pub fn new(limit: u64) -> Self {
        let len = (limit as usize >> 6) + 1;
        let mut words = vec![u64::MAX; len];
        // 0 is divisible by every square
        words[0] &= !1;
        let root = limit.isqrt();
        for p in primes_up_to(root) {
            let sq = p * p;
            let mut n = sq;
            while n <= limit {
                words[(n >> 6) as usize] &= !(1u64 << (n & 63));
                n += sq;
            }
        }
        SquarefreeTable { limit, words }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_squarefree(&self, n: u64) -> Result<bool> {
        if n > self.limit {
            return Err(Error::Range(format!("{n} exceeds table limit {}", self.limit)));
        }
        Ok(self.get(n))
    }

    /// Unchecked lookup for hot loops; `n` must not exceed the limit.
    #[inline]
    pub fn get(&self, n: u64) -> bool {
        (self.words[(n >> 6) as usize] >> (n & 63)) & 1 == 1
    }
}

/// Free-function form of [`SquarefreeTable::is_squarefree`].
pub fn is_squarefree(n: u64, table: &SquarefreeTable) -> Result<bool> {
    table.is_squarefree(n)
}

pub fn is_squarefree_trial(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Limits for [`sieve_discriminants_with`].
#[derive(Clone, Copy, Debug)]
pub struct SieveConfig {
    pub segment: u64,
    /// Largest admissible `hi - lo + 1`.
    pub max_span: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig { segment: 1 << 18, max_span: 2_000_000_000 }
    }
}

/// Squarefree `d ≡ 2 mod 4` in `[lo, hi]`, ascending.
pub fn sieve_discriminants(lo: u64, hi: u64) -> Result<Vec<u64>> {
    sieve_discriminants_with(lo, hi, SieveConfig::default())
}

pub fn sieve_discriminants_with(lo: u64, hi: u64, cfg: SieveConfig) -> Result<Vec<u64>> {
    if lo < 1 || lo > hi {
        return domain(format!("need 1 <= lo <= hi, got [{lo}, {hi}]"));
    }
    if hi - lo >= cfg.max_span {
        return Err(Error::Resource(format!(
            "sieve span {} exceeds budget {}",
            hi - lo + 1,
            cfg.max_span
        )));
    }
    let primes = primes_up_to(hi.isqrt());
    let seg = cfg.segment.max(64);
    let mut out = Vec::with_capacity(((hi - lo) / 5 + 1) as usize);
    let mut flags = vec![true; seg as usize];
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start + seg - 1);
        let len = (end - start + 1) as usize;
        flags[..len].fill(true);
        // odd primes only: d = 2·odd and 4 ∤ d is enforced by the residue filter
        for &p in primes.iter().skip(1) {
            let sq = p * p;
            if sq > end {
                break;
            }
            let mut n = start.div_ceil(sq) * sq;
            while n <= end {
                flags[(n - start) as usize] = false;
                n += sq;
            }
        }
        let first = start + ((2 + 4 - start % 4) % 4);
        let mut n = first;
        while n <= end {
            if flags[(n - start) as usize] {
                out.push(n);
            }
            n += 4;
        }
        start = end + 1;
    }
    Ok(out)
}

/// Primes `p <= n`, ascending.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest-prime-factor table for fast factorization below `limit`.
#[derive(Clone, Debug)]
pub struct SpfTable {
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        SpfTable { spf }
    }

    pub fn limit(&self) -> u64 {
        self.spf.len() as u64 - 1
    }

    /// Factorization as ascending `(prime, exponent)` pairs; falls back to
    /// trial division above the table limit.
    pub fn factor(&self, mut n: u64) -> Vec<(u64, u32)> {
        if n > self.limit() {
            return factor_trial(n);
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }
}

pub fn factor_trial(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All divisors from a factorization, unsorted.
pub fn divisors_of(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &(p, e) in factors {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs
}

pub fn mobius_of(factors: &[(u64, u32)]) -> i32 {
    if factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn mobius(n: u64) -> i32 {
    mobius_of(&factor_trial(n))
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn kronecker_symbol(a: i64, n: u64) -> Result<i32> {
    if n % 2 == 0 {
        return domain(format!("modulus {n} must be odd and positive"));
    }
    Ok(jacobi(a.rem_euclid(n as i64) as u64, n))
}

/// Jacobi symbol with `0 <= a`, `n` odd.
pub fn jacobi(mut a: u64, mut n: u64) -> i32 {
    a %= n;
    let mut sign = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Inverse of `t` modulo `m`, in `[0, m)`.
pub fn mod_inverse(t: i64, m: u64) -> Result<u64> {
    if m == 0 {
        return domain("modulus must be positive");
    }
    if m == 1 {
        return Ok(0);
    }
    let m_i = m as i128;
    let r = (t as i128).rem_euclid(m_i);
    let eg = r.extended_gcd(&m_i);
    if eg.gcd != 1 {
        return domain(format!("gcd({t}, {m}) = {} != 1", eg.gcd));
    }
    Ok(eg.x.rem_euclid(m_i) as u64)
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Tonelli–Shanks: a root of `x² ≡ a mod p` for odd prime `p`, if any.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// All roots of `x² ≡ a mod p^e`, sorted.
pub fn sqrt_mod_prime_power(a: u64, p: u64, e: u32) -> Vec<u64> {
    let pe = p.pow(e);
    let a = a % pe;
    if a == 0 {
        // x ≡ 0 mod p^ceil(e/2)
        let step = p.pow(e.div_ceil(2));
        return (0..pe / step).map(|j| j * step).collect();
    }
    let mut v = 0;
    let mut u = a;
    while u % p == 0 {
        u /= p;
        v += 1;
    }
    if v % 2 == 1 {
        return Vec::new();
    }
    // x = p^(v/2)·y with y² ≡ u mod p^(e-v), y a unit
    let f = e - v;
    let base = unit_sqrt_prime_power(u, p, f);
    if base.is_empty() {
        return base;
    }
    let half = p.pow(v / 2);
    let modf = p.pow(f);
    let mut out = Vec::new();
    // y is determined mod p^f; x = half·y mod p^e needs y mod p^(e - v/2)
    let lifts = pe / half / modf;
    for &y in &base {
        for j in 0..lifts {
            out.push((half * (y + j * modf)) % pe);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn unit_sqrt_prime_power(u: u64, p: u64, f: u32) -> Vec<u64> {
    let pf = p.pow(f);
    if p == 2 {
        let u = u % pf;
        return match f {
            0 => vec![0],
            1 => vec![1],
            2 => {
                if u % 4 == 1 {
                    vec![1, 3]
                } else {
                    vec![]
                }
            }
            _ => {
                if u % 8 != 1 {
                    return vec![];
                }
                // lift a root mod 2^j to mod 2^(j+1), keeping the root set {±x, ±x + 2^(f-1)}
                let mut x = 1u64;
                for j in 3..f {
                    let m = 1u64 << (j + 1);
                    if mul_mod(x, x, m) != u % m {
                        x += 1 << (j - 1);
                    }
                }
                let mut r = vec![x % pf, (pf - x) % pf, (x + pf / 2) % pf, (pf - x + pf / 2) % pf];
                r.sort_unstable();
                r.dedup();
                r
            }
        };
    }
    if f == 0 {
        return vec![0];
    }
    let Some(mut x) = sqrt_mod_prime(u, p) else { return Vec::new() };
    // Hensel: x ← x − (x² − u)/(2x)
    let mut m = p;
    for _ in 1..f {
        m *= p;
        let fx = (mul_mod(x, x, m) + m - u % m) % m;
        let inv = mod_inverse((2 * x % m) as i64, m).expect("2x is a unit");
        x = (x + m - mul_mod(fx, inv, m)) % m;
    }
    let mut r = vec![x, (pf - x) % pf];
    r.sort_unstable();
    r.dedup();
    r
}

/// All roots of `x² ≡ a mod n` given the factorization of `n`, sorted.
pub fn sqrt_mod_composite(a: i64, n: u64, factors: &[(u64, u32)]) -> Vec<u64> {
    if n == 1 {
        return vec![0];
    }
    let a = a.rem_euclid(n as i64) as u64;
    let mut roots = vec![0u64];
    let mut modulus = 1u64;
    for &(p, e) in factors {
        let pe = p.pow(e);
        let local = sqrt_mod_prime_power(a % pe, p, e);
        if local.is_empty() {
            return Vec::new();
        }
        let inv = mod_inverse((modulus % pe) as i64, pe).expect("coprime CRT moduli");
        let new_mod = modulus * pe;
        let mut next = Vec::with_capacity(roots.len() * local.len());
        for &r in &roots {
            for &s in &local {
                // x ≡ r mod modulus, x ≡ s mod pe
                let diff = (s + pe - r % pe) % pe;
                let k = mul_mod(diff, inv, pe);
                next.push(r + modulus * k);
            }
        }
        roots = next;
        modulus = new_mod;
    }
    roots.sort_unstable();
    roots
}

/// Floor square root.
#[inline]
pub fn isqrt(n: u128) -> u128 {
    n.isqrt()
}

/// Smallest `x` with `x² >= n`.
#[inline]
pub fn ceil_sqrt(n: u128) -> u128 {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

#[inline]
pub fn perfect_sqrt(n: u128) -> Option<u128> {
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Representative of `b mod n` in `(-n/2, n/2]`.
#[inline]
pub fn normalize_half(b: i128, n: u64) -> i64 {
    let n = n as i128;
    let mut r = b.rem_euclid(n);
    if 2 * r > n {
        r -= n;
    }
    r as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_small_ranges() {
        assert_eq!(sieve_discriminants(1, 30).unwrap(), vec![2, 6, 10, 14, 22, 26, 30]);
        assert_eq!(sieve_discriminants(1, 29).unwrap(), vec![2, 6, 10, 14, 22, 26]);
        assert_eq!(sieve_discriminants(1, 4).unwrap(), vec![2]);
        assert!(sieve_discriminants(5, 4).is_err());
        assert!(sieve_discriminants(0, 4).is_err());
    }

    #[test]
    fn sieve_segments_agree_with_trial_division() {
        let cfg = SieveConfig { segment: 97, max_span: u64::MAX };
        let got = sieve_discriminants_with(1000, 20000, cfg).unwrap();
        let want: Vec<u64> =
            (1000..=20000).filter(|&n| n % 4 == 2 && is_squarefree_trial(n)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn sieve_budget() {
        let cfg = SieveConfig { segment: 1024, max_span: 100 };
        assert!(matches!(sieve_discriminants_with(1, 1000, cfg), Err(Error::Resource(_))));
    }

    #[test]
    fn density_up_to_ten_thousand() {
        let n = sieve_discriminants(1, 10_000).unwrap().len() as i64;
        let oracle = (1..=10_000u64).filter(|&n| n % 4 == 2 && is_squarefree_trial(n)).count() as i64;
        assert_eq!(n, oracle);
        assert!((n - 2026).abs() <= 5, "{n}");
    }

    #[test]
    fn squarefree_table_matches_trial_division() {
        let t = SquarefreeTable::new(100_000);
        for n in 1..=100_000u64 {
            assert_eq!(t.is_squarefree(n).unwrap(), is_squarefree_trial(n), "{n}");
        }
        assert!(t.is_squarefree(26).unwrap());
        assert!(!t.is_squarefree(18).unwrap());
        assert!(matches!(t.is_squarefree(100_001), Err(Error::Range(_))));
    }

    #[test]
    fn discriminant_validation() {
        assert!(Discriminant::new(26).is_ok());
        assert!(Discriminant::new(18).is_err());
        assert!(Discriminant::new(7).is_err());
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker_symbol(-26, 3).unwrap(), 1);
        assert_eq!(kronecker_symbol(3, 5).unwrap(), -1);
        assert!(kronecker_symbol(3, 4).is_err());
    }

    #[test]
    fn legendre_matches_squares() {
        for p in primes_up_to(101).into_iter().skip(1) {
            let squares: Vec<u64> = (1..p).map(|x| x * x % p).collect();
            for a in 0..p {
                let want = if a == 0 {
                    0
                } else if squares.contains(&a) {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker_symbol(a as i64, p).unwrap(), want);
            }
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(2, 5).unwrap(), 3);
        assert_eq!(mod_inverse(7, 26).unwrap(), 15);
        for m in 2..50 {
            assert_eq!(mod_inverse(1, m).unwrap(), 1);
        }
        assert!(mod_inverse(4, 26).is_err());
        assert_eq!(mod_inverse(-3, 7).unwrap(), 2);
    }

    #[test]
    fn sqrt_mod_matches_brute_force() {
        for n in 1..=400u64 {
            let f = factor_trial(n);
            for a in -30i64..30 {
                let got = sqrt_mod_composite(a, n, &f);
                let want: Vec<u64> = (0..n)
                    .filter(|&x| ((x * x) as i64 - a).rem_euclid(n as i64) == 0)
                    .collect();
                assert_eq!(got, want, "a={a} n={n}");
            }
        }
    }

    #[test]
    fn spf_factorization() {
        let t = SpfTable::new(10_000);
        for n in 2..10_000u64 {
            assert_eq!(t.factor(n), factor_trial(n));
        }
        assert_eq!(t.factor(20_006), factor_trial(20_006));
    }

    #[test]
    fn normalization_half_open() {
        assert_eq!(normalize_half(5, 3), -1);
        assert_eq!(normalize_half(5, 10), 5);
        assert_eq!(normalize_half(-5, 10), 5);
        assert_eq!(normalize_half(4, 9), 4);
        assert_eq!(normalize_half(5, 9), -4);
    }
}
