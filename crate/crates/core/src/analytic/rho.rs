//! Local densities `ρ_{m,l,d}(r)` and their averaged sum `S(z, l, t)`.

use crate::arith::{factor_trial, gcd, is_squarefree_trial, kronecker_symbol, primes_up_to};
use crate::error::{Error, Result};

/// `σ_{m,l}(2^a)`.
pub fn sigma_two(m: u64, l: u64, a: u32) -> u64 {
    let lm = (l % 8) * (m % 8) % 8;
    if a == 0 {
        if l % 4 == 2 {
            4
        } else if lm % 4 == 3 {
            2
        } else {
            0
        }
    } else {
        let target = if a >= 2 { 1 } else { 5 };
        if lm == target {
            4
        } else {
            0
        }
    }
}

fn check_rho(m: u64, l: u64, d: u64, r: u64) -> Result<u64> {
    if m == 0 || l == 0 || d == 0 || r == 0 {
        return Err(Error::Domain("rho arguments must be positive".into()));
    }
    if m % 2 == 0 || d % 2 == 0 {
        return Err(Error::Domain(format!("rho needs m and d odd, got m={m}, d={d}")));
    }
    if !is_squarefree_trial(l) {
        return Err(Error::Domain(format!("rho needs l squarefree, got l={l}")));
    }
    if m % d != 0 {
        return Err(Error::Domain(format!("rho needs d | m, got d={d}, m={m}")));
    }
    let r_odd = r >> r.trailing_zeros();
    if gcd(l.saturating_mul(m), r_odd) != 1 {
        return Err(Error::Domain(format!("rho needs gcd(lm, odd part of r) = 1, got l={l}, m={m}, r={r}")));
    }
    Ok(r_odd)
}

/// Closed form `σ_{m,l}(2^a) ∏_{p | r odd} (1 + (lm/p))`.
pub fn rho_density(m: u64, l: u64, d: u64, r: u64) -> Result<u64> {
    let r_odd = check_rho(m, l, d, r)?;
    let a = r.trailing_zeros();
    let mut v = sigma_two(m, l, a);
    if v == 0 {
        return Ok(0);
    }
    let lm = (l as i64).checked_mul(m as i64).ok_or_else(|| Error::Range("lm overflows".into()))?;
    for (p, _) in factor_trial(r_odd) {
        let k = kronecker_symbol(lm, p)?;
        v *= (1 + k) as u64;
    }
    Ok(v)
}

/// `#{n mod 4r : l m³ − l² d² n² ≡ 2r mod 4r}` by direct count.
pub fn rho_brute(m: u64, l: u64, d: u64, r: u64) -> Result<u64> {
    check_rho(m, l, d, r)?;
    let q = 4 * r as u128;
    let lm3 = (l as u128 % q) * ((m as u128 % q).pow(3) % q) % q;
    let l2d2 = (l as u128 * l as u128 % q) * (d as u128 * d as u128 % q) % q;
    let target = 2 * r as u128;
    let mut count = 0;
    for n in 0..q {
        let v = (lm3 + q - l2d2 * (n * n % q) % q) % q;
        if v == target {
            count += 1;
        }
    }
    Ok(count)
}

/// Literal evaluation of
/// `S(z,l,t) = Σ_{m≤z,(m,2lt)=1} Σ_{d|m} μ(d)σ_{m,l}(2^a)/d · Σ_{s<Z,(s,2lm)=1} μ(s)/s² · Σ♭_{q | st odd} (lm/q)`,
/// where `2^a ∥ t²`.
pub fn local_density_sum(z: u64, l: u64, t: u64, big_z: u64) -> Result<f64> {
    if l == 0 || t == 0 {
        return Err(Error::Domain("l and t must be positive".into()));
    }
    if gcd(l, t) != 1 {
        return Err(Error::Domain(format!("gcd(l, t) = {} ≠ 1", gcd(l, t))));
    }
    if z == 0 {
        return Ok(0.0);
    }
    let a = 2 * t.trailing_zeros();
    let primes: Vec<u64> = primes_up_to(big_z.max(2)).into_iter().filter(|&p| p > 2).collect();

    // odd squarefree s < Z with their prime lists
    let mut s_list: Vec<(u64, f64, Vec<usize>)> = Vec::new();
    for s in (1..big_z).step_by(2) {
        let f = factor_trial(s);
        if f.iter().any(|&(_, e)| e > 1) {
            continue;
        }
        let idx: Vec<usize> = f.iter().map(|&(p, _)| primes.binary_search(&p).unwrap()).collect();
        let mu = if idx.len() % 2 == 0 { 1.0 } else { -1.0 };
        s_list.push((s, mu / (s * s) as f64, idx));
    }
    let t_primes: Vec<u64> = factor_trial(t).into_iter().map(|(p, _)| p).filter(|&p| p > 2).collect();
    let t_flag: Vec<bool> = primes.iter().map(|p| t % p == 0).collect();
    // residue tables for the Legendre symbol mod each small prime
    let legendre: Vec<Vec<i8>> = primes
        .iter()
        .map(|&p| {
            let mut tab = vec![-1i8; p as usize];
            tab[0] = 0;
            for x in 1..p {
                tab[(x * x % p) as usize] = 1;
            }
            tab
        })
        .collect();

    let mut total = 0.0;
    for m in (1..=z).step_by(2) {
        if gcd(m, l * t) != 1 {
            continue;
        }
        let sigma = sigma_two(m, l, a);
        if sigma == 0 {
            continue;
        }
        let lm = l as u128 * m as u128;
        let phi_ratio: f64 = factor_trial(m).iter().map(|&(p, _)| 1.0 - 1.0 / p as f64).product();
        let mut t_part = 1.0;
        for &p in &t_primes {
            t_part *= (1 + kronecker_symbol((lm % p as u128) as i64, p)?) as f64;
        }
        if t_part == 0.0 {
            continue;
        }
        let leg: Vec<i8> = primes
            .iter()
            .zip(&legendre)
            .map(|(&p, tab)| tab[(lm % p as u128) as usize])
            .collect();
        let mut inner = 0.0;
        'outer: for (_, w, idx) in &s_list {
            let mut prod = 1.0;
            for &i in idx {
                let lg = leg[i];
                if lg == 0 {
                    continue 'outer;
                }
                if !t_flag[i] {
                    prod *= (1 + lg) as f64;
                    if prod == 0.0 {
                        break;
                    }
                }
            }
            inner += w * prod;
        }
        total += sigma as f64 * phi_ratio * t_part * inner;
    }
    Ok(total)
}
