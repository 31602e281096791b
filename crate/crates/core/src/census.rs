//! Censuses of Heegner points attached to torsion ideal classes.
//!
//! The direct method walks class groups and the coset action; the tuples
//! method solves `l m^k = l² n² + t² d` and never builds a class group.

use crate::analytic::constants::{c1k, c56};
use crate::analytic::eisenstein::shell_count;
use crate::analytic::euler::DEFAULT_CUTOFF;
use crate::analytic::kernels::{KernelKind, SmoothTestFunction};
use crate::arith::{self, mobius, Discriminant, SpfTable};
use crate::classgroup::{power_raw, reduced_forms, GroupTable, QuadForm};
use crate::error::{Error, Result};
use crate::heegner::{
    coset_count, coset_image, enumerate_primitive_ideals_with, for_each_coset, ideal_class_form,
    ideal_of_form, principal_primitive_count, principal_primitive_ideals, NormBound, PrimitiveIdeal,
    Rational,
};
use crate::torsion::{census_tuples, tuple_census, tuple_pair, MAX_K};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// How a census is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Tuples,
}

/// An ideal passing the current cut, with the order of its class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct IdealHit {
    pub n: u64,
    pub b: i64,
    pub order: u64,
}

/// Per-discriminant census data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusRecord {
    pub d: u64,
    pub h: u64,
    /// `k ↦ |H_k(−d)*|`.
    pub torsion_count: BTreeMap<u64, u64>,
    pub ideal_hits: Vec<IdealHit>,
}

/// Result of [`vertical_census`].
#[derive(Clone, Debug, Serialize)]
pub struct VerticalCensus {
    pub total: u64,
    pub method: Method,
    /// Records for discriminants with at least one class of order `k`; direct method only.
    pub records: Vec<CensusRecord>,
}

fn check_k(k: u64) -> Result<()> {
    if k < 3 || k % 2 == 0 {
        return Err(Error::Domain(format!("k = {k} must be odd and at least 3")));
    }
    if k > MAX_K {
        return Err(Error::Resource(format!("k = {k} exceeds supported maximum {MAX_K}")));
    }
    Ok(())
}

fn y_f64(y: Rational) -> f64 {
    *y.numer() as f64 / *y.denom() as f64
}

fn discriminants(lo: u64, hi: u64) -> Result<Vec<u64>> {
    if hi < 2 || lo > hi {
        return Ok(Vec::new());
    }
    arith::sieve_discriminants(lo.max(1), hi)
}

fn spf_for(big_d: u64) -> SpfTable {
    SpfTable::new(big_d + big_d / 3 + 2)
}

/// Reduced forms of exact order `k` in `H(−d)`, and the class number.
fn classes_of_order(d: u64, k: u64, spf: &SpfTable) -> (u64, Vec<QuadForm>) {
    let mut table = GroupTable::new(d, reduced_forms(d, Some(spf)));
    let idx = table.exact_order_indices(k);
    let forms = idx.iter().map(|&i| table.forms[i]).collect();
    (table.h(), forms)
}

fn direct_record(d: u64, y: Rational, k: u64, spf: &SpfTable) -> CensusRecord {
    let (h, forms) = classes_of_order(d, k, spf);
    let mut hits = Vec::new();
    for f in &forms {
        let a = ideal_of_form(f, d);
        for_each_coset(&a, y, |c, e| {
            let img = coset_image(&a, c, e);
            hits.push(IdealHit { n: img.n, b: img.b, order: k });
        });
    }
    hits.sort_unstable();
    let mut torsion_count = BTreeMap::new();
    torsion_count.insert(k, forms.len() as u64);
    CensusRecord { d, h, torsion_count, ideal_hits: hits }
}

/// `Σ_{d ≤ D} #{primitive a : [a] has order exactly k, N a ≤ Y √d}`.
///
/// Ties `Im z_a = 1/Y` are included.
pub fn vertical_census(big_d: u64, y: Rational, k: u64, method: Method) -> Result<VerticalCensus> {
    check_k(k)?;
    match method {
        Method::Direct => {
            let ds = discriminants(1, big_d)?;
            let spf = spf_for(big_d);
            let records: Vec<CensusRecord> = ds
                .par_iter()
                .map(|&d| direct_record(d, y, k, &spf))
                .filter(|r| r.torsion_count[&k] > 0)
                .collect();
            let total = records.iter().map(|r| r.ideal_hits.len() as u64).sum();
            Ok(VerticalCensus { total, method, records })
        }
        Method::Tuples => Ok(VerticalCensus { total: tuple_count(big_d, y, k)?, method, records: Vec::new() }),
    }
}

/// Möbius combination of tuple counts:
/// `Σ_{k'|k, k'>1} μ(k/k')·2T(k') + μ(k)·P'`, where `P'` counts principal
/// primitive ideals `(u + v√−d)` with `u ≠ 0`.
pub fn tuple_count(big_d: u64, y: Rational, k: u64) -> Result<u64> {
    check_k(k)?;
    let mut total: i128 = 0;
    for kp in arith::divisors_of(&arith::factor_trial(k)) {
        if kp == 1 {
            continue;
        }
        let mu = mobius(k / kp) as i128;
        if mu != 0 {
            total += mu * 2 * tuple_census(big_d, y, kp, false)?.count as i128;
        }
    }
    let mu_k = mobius(k) as i128;
    if mu_k != 0 {
        total += mu_k * principal_nonramified_count(big_d, y) as i128;
    }
    u64::try_from(total).map_err(|_| Error::Integrity(format!("negative tuple census {total}")))
}

fn principal_nonramified_count(big_d: u64, y: Rational) -> u64 {
    let all = principal_primitive_count(big_d, y);
    // the ramified ideal (√−d) has norm d and passes when d ≤ Y²
    let ramified = discriminants(1, big_d)
        .unwrap_or_default()
        .into_iter()
        .filter(|&d| NormBound::ScaledSqrt(y).admits(d, d))
        .count() as u64;
    all - ramified
}

/// Ideals of order exactly `k` with `N ≤ Y√d`, from tuples alone, sorted by `(d, N, b)`.
pub fn tuple_ideal_set(big_d: u64, y: Rational, k: u64) -> Result<Vec<PrimitiveIdeal>> {
    check_k(k)?;
    let collect = |kk: u64| -> Result<Vec<PrimitiveIdeal>> {
        let mut v: Vec<PrimitiveIdeal> = census_tuples(big_d, y, kk)?
            .into_iter()
            .flat_map(|(d, t)| tuple_pair(&t, d))
            .collect();
        v.sort_unstable_by_key(|a| (a.d, a.n, a.b));
        v.dedup();
        Ok(v)
    };
    let mut set = collect(k)?;
    let mut remove: Vec<PrimitiveIdeal> = Vec::new();
    for kp in arith::divisors_of(&arith::factor_trial(k)) {
        if kp > 1 && kp < k {
            remove.extend(collect(kp)?);
        }
    }
    let ymax = y_f64(y).powi(2).ceil() as u64 + 1;
    for d in discriminants(1, big_d.min(ymax))? {
        remove.extend(principal_primitive_ideals(d, y).into_iter().map(|(_, _, a)| a));
    }
    remove.sort_unstable_by_key(|a| (a.d, a.n, a.b));
    set.retain(|a| remove.binary_search_by_key(&(a.d, a.n, a.b), |r| (r.d, r.n, r.b)).is_err());
    Ok(set)
}

/// Ideals of order exactly `k` with `N ≤ Y√d` from class groups, sorted by `(d, N, b)`.
pub fn direct_ideal_set(big_d: u64, y: Rational, k: u64) -> Result<Vec<PrimitiveIdeal>> {
    let vc = vertical_census(big_d, y, k, Method::Direct)?;
    Ok(vc
        .records
        .iter()
        .flat_map(|r| r.ideal_hits.iter().map(move |h| PrimitiveIdeal { d: r.d, n: h.n, b: h.b }))
        .collect())
}

fn ideal_set(big_d: u64, y: Rational, k: u64, method: Method) -> Result<Vec<PrimitiveIdeal>> {
    match method {
        Method::Direct => direct_ideal_set(big_d, y, k),
        Method::Tuples => tuple_ideal_set(big_d, y, k),
    }
}

/// `e(f b/N)` with the argument reduced to `(−1/2, 1/2]` in integers first.
fn e_of(f: i64, b: i64, n: u64) -> Complex64 {
    let r = arith::normalize_half(f as i128 * b as i128, n);
    let theta = 2.0 * PI * (r as f64 / n as f64);
    Complex64::new(theta.cos(), theta.sin())
}

/// Result of [`horizontal_census`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HorizontalCensus {
    pub total: Complex64,
    pub count: u64,
}

/// `Σ e(f Re z_a)` over the ideal set of the `k = 3` vertical census.
pub fn horizontal_census(big_d: u64, y: Rational, f: i64, method: Method) -> Result<HorizontalCensus> {
    if f == 0 {
        return Err(Error::Domain("f must be nonzero".into()));
    }
    let set = ideal_set(big_d, y, 3, method)?;
    let terms: Vec<Complex64> = set.iter().map(|a| e_of(f, a.b, a.n)).collect();
    Ok(HorizontalCensus { total: pairwise_sum(&terms), count: set.len() as u64 })
}

fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn pairwise_sum_f(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum_f(a) + pairwise_sum_f(b)
}

/// Options for [`smoothed_census`].
#[derive(Clone, Copy, Debug)]
pub struct SmoothOptions {
    /// Permit ψ outside the secondary-term admissible class.
    pub main_term_only: bool,
    /// Target for the dropped tail per class.
    pub eps: f64,
}

impl Default for SmoothOptions {
    fn default() -> Self {
        SmoothOptions { main_term_only: false, eps: 1e-13 }
    }
}

/// Result of [`smoothed_census`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SmoothedCensus {
    pub value: f64,
    /// Bound on the contribution of ideals beyond the cutoff.
    pub tail_bound: f64,
    /// Cutoff `T` on `Im(z_a)^{-1}/Y`.
    pub cutoff: f64,
    pub terms: u64,
    pub main_term_only: bool,
}

/// Upper bound on `sup_{v ≥ u} |ψ(v)|`, if known.
fn kernel_tail(psi: &SmoothTestFunction, u: f64) -> Option<f64> {
    match psi.kind {
        KernelKind::EisensteinPsi => Some(if u >= 1.0 { 2.0 * (2.0 * PI * u + 1.0) * (-PI * u).exp() } else { 1.0 }),
        KernelKind::Gaussian => Some((-u * u).exp()),
        _ if psi.has_compact_support() => Some(if u >= psi.support().1 { 0.0 } else { 1.0 }),
        _ => None,
    }
}

/// Smallest integer cutoff `T` whose per-class tail is at most `eps`, with that tail.
fn psi_cutoff(psi: &SmoothTestFunction, y: f64, eps: f64) -> Result<(f64, f64)> {
    if psi.has_compact_support() {
        return Ok((psi.support().1, 0.0));
    }
    let y0 = 3f64.sqrt() / 2.0;
    let tail_at = |t: f64| -> Option<f64> {
        let mut s = 0.0;
        let mut j = 0.0;
        loop {
            let term = shell_count(y * (t + j + 1.0), y0) * kernel_tail(psi, t + j)?;
            s += term;
            if term <= 1e-20 * s || term == 0.0 {
                return Some(s);
            }
            j += 1.0;
        }
    };
    let mut t = 1.0;
    loop {
        let tail = tail_at(t).ok_or_else(|| Error::Config("psi needs compact support or a known decay bound".into()))?;
        if tail <= eps {
            return Ok((t, tail));
        }
        t += 1.0;
        if t > 1e6 {
            return Err(Error::Config("no cutoff meets the requested tail bound".into()));
        }
    }
}

fn check_phi(phi: &SmoothTestFunction) -> Result<()> {
    if !phi.has_compact_support() {
        return Err(Error::Config("phi must have compact support".into()));
    }
    Ok(())
}

/// `Σ_d φ(d/D) Σ_{[a] of order k} ψ(Im(z_a)^{−1}/Y)`.
pub fn smoothed_census(
    big_d: u64,
    y: Rational,
    k: u64,
    phi: &SmoothTestFunction,
    psi: &SmoothTestFunction,
    opts: SmoothOptions,
) -> Result<SmoothedCensus> {
    check_k(k)?;
    check_phi(phi)?;
    if !psi.secondary_admissible() && !opts.main_term_only {
        return Err(Error::Config(format!(
            "psi of kind {:?} is admissible for main-term experiments only; set the main-term-only flag",
            psi.kind
        )));
    }
    let yf = y_f64(y);
    let (lo, hi) = phi.support();
    let dlo = (lo * big_d as f64).floor().max(1.0) as u64;
    let dhi = (hi * big_d as f64).ceil() as u64;
    let ds = discriminants(dlo, dhi)?;
    let spf = spf_for(dhi);
    let sharp = psi.kind == KernelKind::Sharp;
    let (cutoff, per_class_tail) = if sharp { (1.0, 0.0) } else { psi_cutoff(psi, yf, opts.eps)? };
    // rational height admitting every ideal with N/(Y√d) ≤ cutoff
    let y_enum = if sharp {
        y
    } else {
        let scale = 1u64 << 20;
        Rational::new((yf * cutoff * scale as f64).ceil() as u64 + 1, scale)
    };
    let parts: Vec<(f64, f64, u64)> = ds
        .par_iter()
        .map(|&d| {
            let w = phi.eval(d as f64 / big_d as f64);
            if w == 0.0 {
                return (0.0, 0.0, 0);
            }
            let (_, forms) = classes_of_order(d, k, &spf);
            let sd = (d as f64).sqrt();
            let mut vals = Vec::new();
            for f in &forms {
                let a = ideal_of_form(f, d);
                if sharp {
                    vals.push(coset_count(&a, y) as f64);
                    continue;
                }
                for_each_coset(&a, y_enum, |c, e| {
                    let img = coset_image(&a, c, e);
                    vals.push(psi.eval(img.n as f64 / (yf * sd)));
                });
            }
            let n = vals.len() as u64;
            (w * pairwise_sum_f(&vals), w * per_class_tail * forms.len() as f64, n)
        })
        .collect();
    let values: Vec<f64> = parts.iter().map(|p| p.0).collect();
    Ok(SmoothedCensus {
        value: pairwise_sum_f(&values),
        tail_bound: parts.iter().map(|p| p.1).sum(),
        cutoff,
        terms: parts.iter().map(|p| p.2).sum(),
        main_term_only: opts.main_term_only,
    })
}

/// `Σ_d φ(d/D)·|H_3(−d)*|` from class groups.
pub fn dh_average(big_d: u64, phi: &SmoothTestFunction) -> Result<f64> {
    check_phi(phi)?;
    let (lo, hi) = phi.support();
    let dlo = (lo * big_d as f64).floor().max(1.0) as u64;
    let dhi = (hi * big_d as f64).ceil() as u64;
    let ds = discriminants(dlo, dhi)?;
    let spf = spf_for(dhi);
    let vals: Vec<f64> = ds
        .par_iter()
        .map(|&d| {
            let w = phi.eval(d as f64 / big_d as f64);
            if w == 0.0 {
                return 0.0;
            }
            let mut table = GroupTable::new(d, reduced_forms(d, Some(&spf)));
            w * (table.count_dividing(3) - 1) as f64
        })
        .collect();
    Ok(pairwise_sum_f(&vals))
}

/// Comparison of both sides of `Σ* φ(d/D)|H_3(−d)*| = 2 Σ Σ Ψ(1/Im z_a)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DualReport {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    /// Truncation allowance propagated from the Ψ cutoff.
    pub allowance: f64,
    pub pass: bool,
}

pub fn dual_identity_check(big_d: u64, phi: &SmoothTestFunction, eps: f64) -> Result<DualReport> {
    let lhs = dh_average(big_d, phi)?;
    let psi = SmoothTestFunction::eisenstein_psi();
    let opts = SmoothOptions { main_term_only: false, eps };
    let sm = smoothed_census(big_d, Rational::from_integer(1), 3, phi, &psi, opts)?;
    let rhs = 2.0 * sm.value;
    let abs_diff = (lhs - rhs).abs();
    // per-term evaluation error of Ψ plus the dropped tail
    let allowance = 2.0 * (sm.tail_bound + sm.terms as f64 * eps) + 1e-12 * lhs.abs();
    Ok(DualReport {
        lhs,
        rhs,
        abs_diff,
        rel_diff: if lhs != 0.0 { abs_diff / lhs.abs() } else { abs_diff },
        allowance,
        pass: abs_diff <= allowance,
    })
}

/// One rectangle of the strip: `x` within `half_width` of `center` modulo 1,
/// `y0 ≤ Im < y1`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Cell {
    pub x_center: f64,
    pub half_width: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Cell {
    fn contains(&self, x: f64, y: f64) -> bool {
        let mut dx = x - self.x_center;
        dx -= dx.round();
        if dx == 0.5 {
            dx = -0.5;
        }
        -self.half_width <= dx && dx < self.half_width && self.y0 <= y && y < self.y1
    }

    /// `∬ dx dy / y²` over the cell.
    pub fn volume(&self) -> f64 {
        let inv1 = if self.y1.is_finite() { 1.0 / self.y1 } else { 0.0 };
        2.0 * self.half_width * (1.0 / self.y0 - inv1)
    }
}

/// Partition of part of the strip `−1/2 < Re ≤ 1/2` into cells.
#[derive(Clone, Debug, Serialize)]
pub struct EquidistGrid {
    pub cells: Vec<Cell>,
}

impl EquidistGrid {
    /// `nx` columns centred at multiples of `1/nx` (the outermost column wraps
    /// around `±1/2`), crossed with the given `y` edges.
    ///
    /// For `nx` a power of two at least 4 no Heegner point lies on a column
    /// edge, because `4 ∤ N`.
    pub fn centered(nx: u32, y_edges: &[f64]) -> Result<Self> {
        if nx == 0 || y_edges.len() < 2 || y_edges.windows(2).any(|w| !(w[0] < w[1])) || !(y_edges[0] > 0.0) {
            return Err(Error::Domain("grid needs nx ≥ 1 and increasing positive y edges".into()));
        }
        let hw = 0.5 / nx as f64;
        let mut cells = Vec::new();
        for w in y_edges.windows(2) {
            for j in 0..nx {
                let mut c = j as f64 / nx as f64;
                if c > 0.5 {
                    c -= 1.0;
                }
                cells.push(Cell { x_center: c, half_width: hw, y0: w[0], y1: w[1] });
            }
        }
        Ok(EquidistGrid { cells })
    }

    /// Index of the mirror cell under `x ↦ −x`.
    pub fn mirror_of(&self, i: usize) -> Option<usize> {
        let c = self.cells[i];
        self.cells.iter().position(|o| {
            let mut s = o.x_center + c.x_center;
            s -= s.round();
            s.abs() < 1e-12 && o.half_width == c.half_width && o.y0 == c.y0 && o.y1 == c.y1
        })
    }
}

/// A histogram cell with its empirical and model counts.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CellCount {
    pub cell: Cell,
    pub count: u64,
    pub model: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquidistHistogram {
    pub cells: Vec<CellCount>,
    /// Points in no cell.
    pub outside: u64,
    pub total: u64,
}

/// Heegner points of order-3 ideals with `Im ≥ 1/Ymax`, binned against
/// `(6D/π³)·∬_cell dx dy/y²`.
pub fn equidist_histogram(big_d: u64, y_max: Rational, grid: &EquidistGrid, method: Method) -> Result<EquidistHistogram> {
    let floor = 1.0 / y_f64(y_max);
    if grid.cells.iter().any(|c| c.y0 < floor - 1e-12 || c.half_width <= 0.0 || c.half_width > 0.5) {
        return Err(Error::Domain("grid cells must lie in the strip above 1/Ymax".into()));
    }
    let set = ideal_set(big_d, y_max, 3, method)?;
    let mut counts = vec![0u64; grid.cells.len()];
    let mut outside = 0;
    for a in &set {
        let x = a.b as f64 / a.n as f64;
        let y = (a.d as f64).sqrt() / a.n as f64;
        match grid.cells.iter().position(|c| c.contains(x, y)) {
            Some(i) => counts[i] += 1,
            None => outside += 1,
        }
    }
    let scale = 6.0 * big_d as f64 / PI.powi(3);
    let cells = grid
        .cells
        .iter()
        .zip(counts)
        .map(|(c, n)| CellCount { cell: *c, count: n, model: scale * c.volume() })
        .collect();
    Ok(EquidistHistogram { cells, outside, total: set.len() as u64 })
}

/// An ideal of order `k` whose norm violates `N^k ≥ d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CuspViolation {
    pub d: u64,
    pub n: u64,
    pub b: i64,
}

/// Order of the class of `a`, for orders up to `limit` (0 if larger).
fn class_order_upto(a: &PrimitiveIdeal, limit: u64) -> u64 {
    let f = ideal_class_form(a);
    let id = QuadForm::identity(a.d);
    let mut g = f;
    for j in 1..=limit {
        if g == id {
            return j;
        }
        g = crate::classgroup::compose_raw(g, f, a.d);
    }
    0
}

/// Order-`k` ideals with `N^k < d`; always empty for a correct census.
pub fn cusp_cutoff_audit(big_d: u64, k: u64) -> Result<Vec<CuspViolation>> {
    cusp_cutoff_audit_with(big_d, k, |a| class_order_upto(a, k))
}

/// [`cusp_cutoff_audit`] with an injectable class-order oracle.
pub fn cusp_cutoff_audit_with(
    big_d: u64,
    k: u64,
    order: impl Fn(&PrimitiveIdeal) -> u64 + Sync,
) -> Result<Vec<CuspViolation>> {
    check_k(k)?;
    let ds = discriminants(1, big_d)?;
    let spf = spf_for(big_d);
    let found: Vec<Vec<CuspViolation>> = ds
        .par_iter()
        .map(|&d| {
            // largest N with N^k < d
            let mut nmax = 1u64;
            while ((nmax + 1) as u128).pow(k as u32) < d as u128 {
                nmax += 1;
            }
            let disc = Discriminant::new_unchecked(d);
            enumerate_primitive_ideals_with(disc, NormBound::Abs(nmax), Some(&spf))
                .into_iter()
                .filter(|a| !a.is_unit() && order(a) == k)
                .map(|a| CuspViolation { d, n: a.n, b: a.b })
                .collect()
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

/// Raise an integrity error if the audit found anything.
pub fn assert_cusp_cutoff(violations: &[CuspViolation]) -> Result<()> {
    match violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::Integrity(format!(
            "{} order-k ideals below the cusp cutoff, first d={} N={} b={}",
            violations.len(),
            v.d,
            v.n,
            v.b
        ))),
    }
}

/// Which asymptotic prediction to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelMode {
    /// Sharp cut `d ≤ D`, `Im z_a ≥ 1/Y`.
    Sharp,
    /// Smoothed weights `φ(d/D)ψ(Im(z_a)^{−1}/Y)`.
    Smoothed,
    /// Smoothed class-number average with leading constant `2/π²`.
    Conjecture,
}

/// Main and secondary terms of a prediction.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AsymptoticModel {
    pub mode: ModelMode,
    pub main_coeff: f64,
    pub secondary_coeff: f64,
    /// Powers of `D` carried by the two terms.
    pub exponents: (f64, f64),
    pub main: f64,
    pub secondary: f64,
}

impl AsymptoticModel {
    pub fn total(&self) -> f64 {
        self.main + self.secondary
    }
}

fn mellin_re(f: &SmoothTestFunction, s: f64) -> Result<f64> {
    Ok(f.mellin(Complex64::new(s, 0.0))?.re)
}

pub fn asymptotic_model(
    big_d: u64,
    y: Rational,
    k: u64,
    phi: &SmoothTestFunction,
    psi: &SmoothTestFunction,
    mode: ModelMode,
) -> Result<AsymptoticModel> {
    check_k(k)?;
    let kf = k as f64;
    let df = big_d as f64;
    let yf = y_f64(y);
    let e2 = 0.5 + 1.0 / kf;
    let (main_coeff, secondary_coeff) = match mode {
        ModelMode::Sharp => {
            let sec = if k == 3 { c56(DEFAULT_CUTOFF)?.value } else { c1k(k, DEFAULT_CUTOFF)?.value / e2 };
            (6.0 / PI.powi(3) * yf, sec)
        }
        ModelMode::Smoothed => {
            let main = 6.0 / PI.powi(3) * mellin_re(phi, 1.0)? * mellin_re(psi, 1.0)? * yf;
            let sec = c1k(k, DEFAULT_CUTOFF)?.value * mellin_re(phi, e2)? * psi.residue_at_zero();
            (main, sec)
        }
        ModelMode::Conjecture => {
            let main = 2.0 / (PI * PI) * mellin_re(phi, 1.0)?;
            (main, c1k(k, DEFAULT_CUTOFF)?.value * mellin_re(phi, e2)?)
        }
    };
    Ok(AsymptoticModel {
        mode,
        main_coeff,
        secondary_coeff,
        exponents: (1.0, e2),
        main: main_coeff * df,
        secondary: secondary_coeff * df.powf(e2),
    })
}

/// Independent scan oracle: every primitive ideal with `N ≤ Y√d` whose class has order exactly `k`.
pub fn scan_ideal_set(big_d: u64, y: Rational, k: u64) -> Result<Vec<PrimitiveIdeal>> {
    check_k(k)?;
    let ds = discriminants(1, big_d)?;
    let mut out = Vec::new();
    for d in ds {
        let disc = Discriminant::new_unchecked(d);
        for a in enumerate_primitive_ideals_with(disc, NormBound::ScaledSqrt(y), None) {
            let f = ideal_class_form(&a);
            if power_raw(f, k, d) != QuadForm::identity(d) {
                continue;
            }
            if arith::factor_trial(k).iter().all(|&(p, _)| power_raw(f, k / p, d) != QuadForm::identity(d)) {
                out.push(a);
            }
        }
    }
    Ok(out)
}
