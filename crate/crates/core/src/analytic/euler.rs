//! Euler products `∏_p (1 + h(p))` with a certified tail.
//!
//! Primes up to the cutoff are multiplied directly. Beyond it, `log(1 + h)`
//! is expanded as a generalized power series `Σ c_i p^{−e_i}` and each term
//! is summed over the remaining primes through the prime zeta function.

use super::special::zeta_minus_one;
use super::Certified;
use crate::arith::{mobius, primes_up_to};
use crate::error::{Error, Result};
use std::sync::OnceLock;

const EXP_EPS: f64 = 1e-9;

/// Finite sum `Σ c_i q^{e_i}` in a formal variable `q = 1/p`, truncated above `cap`.
#[derive(Clone, Debug, Default)]
pub struct GenSeries {
    terms: Vec<(f64, f64)>,
    cap: f64,
}

impl GenSeries {
    pub fn zero(cap: f64) -> Self {
        Self { terms: Vec::new(), cap }
    }

    pub fn mono(e: f64, c: f64, cap: f64) -> Self {
        let mut s = Self::zero(cap);
        s.push(e, c);
        s
    }

    fn push(&mut self, e: f64, c: f64) {
        if e > self.cap + EXP_EPS || c == 0.0 {
            return;
        }
        match self.terms.iter_mut().find(|(x, _)| (x - e).abs() < EXP_EPS) {
            Some(t) => t.1 += c,
            None => self.terms.push((e, c)),
        }
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn min_exponent(&self) -> Option<f64> {
        self.terms.iter().map(|t| t.0).fold(None, |m, e| Some(m.map_or(e, |m: f64| m.min(e))))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut s = self.clone();
        for &(e, c) in &other.terms {
            s.push(e, c);
        }
        s.terms.retain(|t| t.1 != 0.0);
        s
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut s = Self::zero(self.cap);
        for &(e, c) in &self.terms {
            s.push(e, c * k);
        }
        s
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut s = Self::zero(self.cap.min(other.cap));
        for &(e1, c1) in &self.terms {
            for &(e2, c2) in &other.terms {
                s.push(e1 + e2, c1 * c2);
            }
        }
        s
    }

    fn power_series(&self, coeff: impl Fn(usize) -> f64, include_one: bool) -> Result<Self> {
        let min = self.min_exponent().unwrap_or(f64::INFINITY);
        if min <= 0.0 {
            return Err(Error::Domain("series needs positive exponents".into()));
        }
        let mut out = if include_one { Self::mono(0.0, 1.0, self.cap) } else { Self::zero(self.cap) };
        let mut pow = self.clone();
        let mut j = 1;
        while !pow.terms.is_empty() {
            out = out.add(&pow.scale(coeff(j)));
            pow = pow.mul(self);
            j += 1;
        }
        Ok(out)
    }

    /// `log(1 + self)`.
    pub fn log1p(&self) -> Result<Self> {
        self.power_series(|j| if j % 2 == 1 { 1.0 / j as f64 } else { -1.0 / j as f64 }, false)
    }

    /// `1 / (1 + self)`.
    pub fn inv1p(&self) -> Result<Self> {
        self.power_series(|j| if j % 2 == 1 { -1.0 } else { 1.0 }, true)
    }

    pub fn eval(&self, q: f64) -> f64 {
        self.terms.iter().map(|&(e, c)| c * q.powf(e)).sum()
    }
}

/// Euler product specification: local factor `1 + h(p)`, its series in `1/p`,
/// and the prime cutoff for direct multiplication.
pub struct EulerProductSpec {
    pub local: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub series: Box<dyn Fn(f64) -> Result<GenSeries> + Send + Sync>,
    pub odd_only: bool,
    pub prime_cutoff: u64,
}

/// Result of an Euler-product evaluation.
#[derive(Clone, Copy, Debug)]
pub struct EulerValue {
    pub value: f64,
    pub log_value: f64,
    pub err: f64,
    pub tail_bound: f64,
}

impl EulerValue {
    pub fn certified(&self) -> Certified {
        Certified { value: self.value, err: self.err }
    }
}

pub const DEFAULT_CUTOFF: u64 = 100_000;

fn cached_primes(limit: u64) -> std::borrow::Cow<'static, [u64]> {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    const CACHE: u64 = 1 << 21;
    if limit <= CACHE {
        let all = PRIMES.get_or_init(|| primes_up_to(CACHE));
        let n = all.partition_point(|&p| p <= limit);
        std::borrow::Cow::Borrowed(&all[..n])
    } else {
        std::borrow::Cow::Owned(primes_up_to(limit))
    }
}

/// `Σ_{p > P} p^{−s}` for real `s > 1`, with an error estimate.
pub fn prime_zeta_tail(s: f64, primes: &[u64]) -> Result<(f64, f64)> {
    if s <= 1.0 {
        return Err(Error::Domain(format!("prime zeta needs s > 1, got {s}")));
    }
    let big_p = *primes.last().unwrap_or(&1) as f64;
    let mut total = 0.0;
    let mut roundoff = 0.0;
    let mut n = 1u64;
    loop {
        let ns = n as f64 * s;
        // log ζ_{>P}(ns) ≈ P^{1−ns}/((ns−1) log P)
        let est = big_p.powf(1.0 - ns) / ((ns - 1.0) * big_p.ln().max(1.0));
        if n > 1 && est < 1e-30 {
            break;
        }
        let mu = mobius(n);
        if mu != 0 {
            let mut acc = zeta_minus_one(ns).ln_1p();
            let mut comp = 0.0;
            let mut mag = acc.abs();
            for &p in primes {
                let term = (-(p as f64).powf(-ns)).ln_1p();
                if term == 0.0 {
                    break;
                }
                // Kahan summation
                let y = term - comp;
                let t = acc + y;
                comp = (t - acc) - y;
                acc = t;
                mag += term.abs();
            }
            total += mu as f64 / n as f64 * acc;
            roundoff += 4.0 * f64::EPSILON * mag / n as f64;
        }
        n += 1;
        if n > 200 {
            break;
        }
    }
    Ok((total, roundoff))
}

/// `log(1 + x)` summed over primes with Kahan compensation.
fn direct_log_sum(primes: &[u64], local: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let mut acc = 0.0;
    let mut comp = 0.0;
    let mut mag = 0.0;
    for &p in primes {
        let term = local(p as f64).ln_1p();
        let y = term - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        mag += term.abs();
    }
    (acc, 4.0 * f64::EPSILON * mag)
}

impl EulerProductSpec {
    pub fn new(
        local: impl Fn(f64) -> f64 + Send + Sync + 'static,
        series: impl Fn(f64) -> Result<GenSeries> + Send + Sync + 'static,
        odd_only: bool,
    ) -> Self {
        Self { local: Box::new(local), series: Box::new(series), odd_only, prime_cutoff: DEFAULT_CUTOFF }
    }

    pub fn with_cutoff(mut self, cutoff: u64) -> Self {
        self.prime_cutoff = cutoff;
        self
    }

    pub fn evaluate(&self) -> Result<EulerValue> {
        let cutoff = self.prime_cutoff.max(100);
        let primes = cached_primes(cutoff);
        let used: &[u64] = if self.odd_only { &primes[1..] } else { &primes };
        let (head, head_err) = direct_log_sum(used, &*self.local);

        // log-series truncated at e_max, with the band (e_max, e_max + 2] used to bound the rest
        let p0 = cutoff as f64;
        let e_max = 1.0 + 17.0 / p0.log10();
        let wide = (self.series)(e_max + 2.0)?.log1p()?;
        let mut tail = 0.0;
        let mut tail_err = 0.0;
        let mut omitted = 0.0;
        for &(e, c) in wide.terms() {
            if e <= 1.0 + 1e-12 {
                return Err(Error::Domain(format!("local factor has divergent term p^-{e}")));
            }
            if e <= e_max {
                let (v, r) = prime_zeta_tail(e, &primes)?;
                tail += c * v;
                tail_err += c.abs() * r;
            } else {
                omitted += c.abs() * p0.powf(1.0 - e) / (e - 1.0);
            }
        }
        let tail_bound = 2.0 * omitted + 1e-300;
        let log_value = head + tail;
        let value = log_value.exp();
        let log_err = head_err + tail_err + tail_bound;
        let err = value * (log_err.exp_m1() + 2.0 * f64::EPSILON);
        Ok(EulerValue { value, log_value, err, tail_bound })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn zeta_two_spec() -> EulerProductSpec {
        // ∏ (1 − p^{-2})^{-1} = π²/6
        EulerProductSpec::new(
            |p| 1.0 / (p * p - 1.0),
            |cap| {
                let x = GenSeries::mono(2.0, -1.0, cap);
                Ok(x.inv1p()?.add(&GenSeries::mono(0.0, -1.0, cap)))
            },
            false,
        )
    }

    #[test]
    fn series_algebra() {
        let x = GenSeries::mono(1.0, 1.0, 6.0);
        let inv = x.inv1p().unwrap();
        assert!((inv.eval(0.1) - 1.0 / 1.1).abs() < 1e-6);
        let l = x.log1p().unwrap();
        assert!((l.eval(0.1) - 1.1f64.ln()).abs() < 1e-7);
        let prod = x.mul(&x);
        assert_eq!(prod.terms(), &[(2.0, 1.0)]);
    }

    #[test]
    fn prime_zeta_matches_direct_sum() {
        let small: Vec<u64> = primes_up_to(1000);
        let big = primes_up_to(2_000_000);
        let (t, _) = prime_zeta_tail(3.0, &small).unwrap();
        let direct: f64 = big.iter().filter(|&&p| p > 1000).map(|&p| (p as f64).powi(-3)).sum();
        assert!((t - direct).abs() < 1e-13, "{t} {direct}");
    }

    #[test]
    fn zeta_two_product() {
        let v = zeta_two_spec().evaluate().unwrap();
        assert!((v.value - PI * PI / 6.0).abs() <= v.err.max(1e-14), "{} {}", v.value, v.err);
        assert!(v.err < 1e-12);
    }

    #[test]
    fn cutoff_refinement_stable() {
        let a = zeta_two_spec().with_cutoff(10_000).evaluate().unwrap();
        let b = zeta_two_spec().with_cutoff(20_000).evaluate().unwrap();
        assert!((a.value - b.value).abs() <= a.err + b.err + 1e-14);
    }
}
