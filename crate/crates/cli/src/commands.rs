//! Command dispatch.

use crate::cache::{cache_text, CacheDir, CacheEntry, CACHE_ENV};
use crate::config::{parse_rational, RunConfig, MAX_D};
use crate::output::{write_atomic, write_json};
use crate::CliError;
use heegner_core::analytic::constants::constants_report;
use heegner_core::analytic::eisenstein::sample_points;
use heegner_core::analytic::*;
use heegner_core::arith::{is_squarefree_trial, sieve_discriminants, Discriminant, SpfTable};
use heegner_core::census::*;
use heegner_core::classgroup::class_group_with;
use heegner_core::heegner::Rational;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::path::PathBuf;

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub summary: Value,
    /// False when a verification check failed (exit status 1).
    pub passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

struct Check {
    name: String,
    pass: bool,
    detail: Value,
}

fn check(name: &str, pass: bool, detail: Value) -> Check {
    Check { name: name.into(), pass, detail }
}

const DEFAULT_EDGES: [f64; 8] = [0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0, 1.5, 2.0, 3.0];
const MAX_CENSUS_D: u64 = 10_000_000;
const MAX_VERIFY_D: u64 = 100_000;
const MAX_CUTOFF: u64 = 2_000_000;
const ATTAINED_DIGITS: u64 = 15;

fn conventions() -> Value {
    json!({
        "discriminants": "squarefree d = 2 mod 4 with d <= D, forms of discriminant -4d",
        "boundary": "ideals with Im(z_a) = 1/Y exactly (N = Y sqrt(d)) are counted",
        "order": "classes of order exactly k",
        "dh_model_leading_constant": "2/pi^2",
        "dh_model_note": "2/pi^2 is used; a leading constant 2/pi is inconsistent with the 6/pi^3 strip density and is not used",
        "float": "binary64",
    })
}

/// Runs a command and writes its artifacts.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut csv: Option<String> = None;
    let (result, checks) = match cfg.command.as_str() {
        "sieve" => cmd_sieve(cfg, &mut csv)?,
        "classgroup" => cmd_classgroup(cfg, &mut csv)?,
        "census-vertical" => cmd_vertical(cfg, &mut csv)?,
        "census-horizontal" => cmd_horizontal(cfg)?,
        "census-smoothed" => cmd_smoothed(cfg)?,
        "dh" => cmd_dh(cfg)?,
        "equidist" => cmd_equidist(cfg, &mut csv)?,
        "constants" => cmd_constants(cfg)?,
        "verify" => cmd_verify(cfg)?,
        other => return Err(CliError::Config(format!("unknown command `{other}`"))),
    };
    let passed = checks.iter().all(|c| c.pass);
    let checks_json: Vec<Value> =
        checks.iter().map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail})).collect();
    let config: serde_json::Map<String, Value> =
        cfg.values.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    let summary = json!({
        "command": cfg.command,
        "status": if passed { "ok" } else { "fail" },
        "config": config,
        "conventions": conventions(),
        "result": result,
        "checks": checks_json,
    });
    if let Some(path) = cfg.get("csv") {
        let text = csv.ok_or_else(|| CliError::Config(format!("command {} has no CSV output", cfg.command)))?;
        write_atomic(&PathBuf::from(path), text.as_bytes())?;
    }
    if let Some(path) = cfg.get("output") {
        write_json(&PathBuf::from(path), &summary)?;
    }
    Ok(Outcome { summary, passed })
}

fn big_d(cfg: &RunConfig) -> Result<u64, CliError> {
    cfg.u64_req("D", MAX_CENSUS_D)
}

fn methods(cfg: &RunConfig, default: &str) -> Vec<Method> {
    match cfg.get("method").unwrap_or(default) {
        "direct" => vec![Method::Direct],
        "tuples" => vec![Method::Tuples],
        _ => vec![Method::Direct, Method::Tuples],
    }
}

fn y_f64(y: Rational) -> f64 {
    *y.numer() as f64 / *y.denom() as f64
}

/// `sharp`, `gaussian`, `eisenstein` or `bump:LO:HI`.
fn parse_kernel(spec: &str) -> Result<SmoothTestFunction, CliError> {
    match spec {
        "sharp" => Ok(SmoothTestFunction::sharp()),
        "gaussian" => Ok(SmoothTestFunction::gaussian()),
        "eisenstein" => Ok(SmoothTestFunction::eisenstein_psi()),
        s if s.starts_with("bump:") => {
            let parts: Vec<&str> = s[5..].split(':').collect();
            let num = |x: &str| -> Result<f64, CliError> {
                let r = parse_rational(x).map_err(CliError::Config)?;
                Ok(y_f64(r))
            };
            if parts.len() != 2 {
                return Err(CliError::Config(format!("bump needs bump:LO:HI, got `{s}`")));
            }
            Ok(SmoothTestFunction::bump_on(num(parts[0])?, num(parts[1])?)?)
        }
        s => Err(CliError::Config(format!("unknown test function `{s}`; use sharp, gaussian, eisenstein or bump:LO:HI"))),
    }
}

fn cache_dir(cfg: &RunConfig) -> Result<Option<CacheDir>, CliError> {
    let root = match cfg.get("cache") {
        Some(p) => Some(PathBuf::from(p)),
        None => std::env::var_os(CACHE_ENV).map(PathBuf::from),
    };
    root.map(CacheDir::new).transpose()
}

fn cmd_sieve(cfg: &RunConfig, csv: &mut Option<String>) -> Result<(Value, Vec<Check>), CliError> {
    let hi = match cfg.u64_opt("hi", MAX_D)? {
        Some(h) => h,
        None => cfg.u64_req("D", MAX_D)?,
    };
    let lo = cfg.u64_or("lo", 1, MAX_D)?;
    let ds = if hi >= lo.max(1) { sieve_discriminants(lo.max(1), hi)? } else { Vec::new() };
    let mut text = String::from("d\n");
    for d in &ds {
        text.push_str(&format!("{d}\n"));
    }
    *csv = Some(text);
    let head: Vec<u64> = ds.iter().take(20).copied().collect();
    Ok((json!({"lo": lo, "hi": hi, "count": ds.len(), "first": head}), Vec::new()))
}

fn entries_json(entries: &[CacheEntry]) -> Value {
    let with3 = entries.iter().filter(|e| e.torsion[0] > 0).count();
    let sum3: u64 = entries.iter().map(|e| e.torsion[0]).sum();
    json!({"discriminants": entries.len(), "with_order_3": with3, "order_3_classes": sum3})
}

fn compute_entries(hi: u64, shards: usize) -> Result<Vec<CacheEntry>, CliError> {
    let ds = if hi >= 2 { sieve_discriminants(1, hi)? } else { Vec::new() };
    let spf = SpfTable::new(hi + hi / 3 + 2);
    let chunk = ds.len().div_ceil(shards).max(1);
    let parts: Vec<Vec<CacheEntry>> = std::thread::scope(|s| {
        let hs: Vec<_> = ds
            .chunks(chunk)
            .map(|c| {
                let spf = &spf;
                s.spawn(move || c.iter().map(|&d| CacheEntry::compute(d, Some(spf))).collect::<Vec<_>>())
            })
            .collect();
        hs.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    Ok(parts.into_iter().flatten().collect())
}

/// Entries for `d <= hi`, through the cache when one is configured.
fn class_entries(cfg: &RunConfig, hi: u64) -> Result<(Vec<CacheEntry>, Value), CliError> {
    let shards = cfg.u64_or("shards", 1, 256)? as usize;
    match cache_dir(cfg)? {
        Some(dir) => {
            let (entries, rep) = dir.ensure(hi, shards)?;
            for w in &rep.warnings {
                eprintln!("{}", json!({"status": "warning", "message": w}));
            }
            let info = json!({
                "cache_file": dir.merged_path().display().to_string(),
                "computed": rep.computed,
                "reused": rep.reused,
                "warnings": rep.warnings,
            });
            Ok((entries, info))
        }
        None => {
            let entries = compute_entries(hi, shards)?;
            let n = entries.len();
            Ok((entries, json!({"cache_file": null, "computed": n, "reused": 0, "warnings": []})))
        }
    }
}

fn cmd_classgroup(cfg: &RunConfig, csv: &mut Option<String>) -> Result<(Value, Vec<Check>), CliError> {
    if let Some(d) = cfg.u64_opt("d", MAX_D)? {
        let disc = Discriminant::new(d)?;
        let g = class_group_with(disc, None);
        let forms: Vec<Value> = g
            .reduced_forms
            .iter()
            .zip(&g.order_of)
            .map(|(f, o)| json!({"a": f.a, "b": f.b, "c": f.c, "order": o}))
            .collect();
        let e = CacheEntry::compute(d, None);
        *csv = Some(cache_text(std::slice::from_ref(&e)));
        return Ok((
            json!({"d": d, "h": g.h, "structure": g.structure, "forms": forms,
                   "order_counts": {"3": e.torsion[0], "5": e.torsion[1], "7": e.torsion[2], "9": e.torsion[3]}}),
            Vec::new(),
        ));
    }
    let hi = match cfg.u64_opt("hi", MAX_CENSUS_D)? {
        Some(h) => h,
        None => cfg.u64_req("D", MAX_CENSUS_D)?,
    };
    let (entries, info) = class_entries(cfg, hi)?;
    *csv = Some(cache_text(&entries));
    let mut odd = Vec::new();
    for e in &entries {
        if e.torsion.iter().any(|t| t % 2 == 1) {
            odd.push(e.d);
        }
    }
    let checks = vec![check("order counts even", odd.is_empty(), json!({"offending": odd}))];
    Ok((json!({"D": hi, "summary": entries_json(&entries), "cache": info}), checks))
}

fn vertical_model(d: u64, y: Rational, k: u64) -> Result<AsymptoticModel, CliError> {
    let s = SmoothTestFunction::sharp();
    Ok(asymptotic_model(d, y, k, &s, &s, ModelMode::Sharp)?)
}

fn model_json(m: &AsymptoticModel, empirical: f64) -> Value {
    json!({
        "mode": m.mode,
        "main_coeff": m.main_coeff,
        "secondary_coeff": m.secondary_coeff,
        "exponents": [m.exponents.0, m.exponents.1],
        "main": m.main,
        "secondary": m.secondary,
        "total": m.total(),
        "ratio_to_main": empirical / m.main,
        "ratio_to_total": empirical / m.total(),
        "residual": empirical - m.total(),
    })
}

fn band_check(cfg: &RunConfig, name: &str, ratio: f64) -> Result<Option<Check>, CliError> {
    let lo = cfg.f64_opt("tol.ratio_min")?;
    let hi = cfg.f64_opt("tol.ratio_max")?;
    if lo.is_none() && hi.is_none() {
        return Ok(None);
    }
    let (lo, hi) = (lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY));
    Ok(Some(check(name, lo <= ratio && ratio <= hi, json!({"ratio": ratio, "min": lo, "max": hi}))))
}

fn cmd_vertical(cfg: &RunConfig, csv: &mut Option<String>) -> Result<(Value, Vec<Check>), CliError> {
    let d = big_d(cfg)?;
    let y = cfg.rational("Y", Rational::from_integer(1))?;
    let k = cfg.k(3)?;
    let mut totals = serde_json::Map::new();
    let mut values = Vec::new();
    for m in methods(cfg, "both") {
        let vc = vertical_census(d, y, k, m)?;
        if m == Method::Direct {
            let mut text = String::from("d,h,order_k_classes,hits\n");
            for r in &vc.records {
                let hits: Vec<String> = r.ideal_hits.iter().map(|h| format!("{}:{}", h.n, h.b)).collect();
                text.push_str(&format!("{},{},{},{}\n", r.d, r.h, r.torsion_count[&k], hits.join(";")));
            }
            *csv = Some(text);
        }
        totals.insert(if m == Method::Direct { "direct" } else { "tuples" }.into(), json!(vc.total));
        values.push(vc.total);
    }
    let total = values[0];
    let mut checks = Vec::new();
    let matched = values.iter().all(|&v| v == total);
    if values.len() == 2 {
        checks.push(check("methods agree", matched, json!({"direct": values[0], "tuples": values[1]})));
    }
    let model = vertical_model(d, y, k)?;
    if let Some(c) = band_check(cfg, "ratio to main term", total as f64 / model.main)? {
        checks.push(c);
    }
    let mut result = json!({"D": d, "Y": y.to_string(), "k": k, "total": total, "model": model_json(&model, total as f64)});
    let obj = result.as_object_mut().expect("object");
    obj.extend(totals);
    if values.len() == 2 {
        obj.insert("match".into(), json!(matched));
    }
    Ok((result, checks))
}

fn cmd_horizontal(cfg: &RunConfig) -> Result<(Value, Vec<Check>), CliError> {
    let d = big_d(cfg)?;
    let y = cfg.rational("Y", Rational::from_integer(1))?;
    let f = cfg.f()?;
    let mut rows = Vec::new();
    for m in methods(cfg, "tuples") {
        rows.push((m, horizontal_census(d, y, f, m)?));
    }
    let h = rows[0].1;
    let vertical = h.count as f64;
    let ratio = if h.count > 0 { h.total.norm() / vertical } else { 0.0 };
    let mut checks = vec![check(
        "conjugate pairs cancel imaginary part",
        h.total.im.abs() <= 1e-9 * vertical.max(1.0),
        json!({"im": h.total.im}),
    )];
    if rows.len() == 2 {
        let diff = (rows[0].1.total - rows[1].1.total).norm();
        checks.push(check("methods agree", diff <= 1e-9 * vertical.max(1.0), json!({"difference": diff})));
    }
    if let Some(t) = cfg.f64_opt("tol.horizontal_max")? {
        checks.push(check("ratio below tolerance", ratio <= t, json!({"ratio": ratio, "max": t})));
    }
    Ok((
        json!({"D": d, "Y": y.to_string(), "f": f, "re": h.total.re, "im": h.total.im, "count": h.count, "ratio": ratio}),
        checks,
    ))
}

fn cmd_smoothed(cfg: &RunConfig) -> Result<(Value, Vec<Check>), CliError> {
    let d = big_d(cfg)?;
    let y = cfg.rational("Y", Rational::from_integer(1))?;
    let k = cfg.k(3)?;
    let phi = parse_kernel(cfg.get("phi").unwrap_or("bump:1:2"))?;
    let psi = parse_kernel(cfg.get("psi").unwrap_or("eisenstein"))?;
    let main_only = cfg.flag("main_term_only")?;
    let eps = cfg.f64_opt("eps")?.unwrap_or(1e-13);
    let s = smoothed_census(d, y, k, &phi, &psi, SmoothOptions { main_term_only: main_only, eps })?;
    let model = asymptotic_model(d, y, k, &phi, &psi, ModelMode::Smoothed)?;
    let mut mj = model_json(&model, s.value);
    if !psi.secondary_admissible() {
        let o = mj.as_object_mut().expect("object");
        o.insert("secondary_certified".into(), json!(false));
        o.insert("warning".into(), json!("psi is outside the admissible class; only the main term applies"));
    }
    let mut checks = Vec::new();
    if let Some(c) = band_check(cfg, "ratio to main term", s.value / model.main)? {
        checks.push(c);
    }
    Ok((
        json!({"D": d, "Y": y.to_string(), "k": k, "value": s.value, "tail_bound": s.tail_bound,
               "psi_cutoff": s.cutoff, "terms": s.terms, "main_term_only": main_only, "model": mj}),
        checks,
    ))
}

fn cmd_dh(cfg: &RunConfig) -> Result<(Value, Vec<Check>), CliError> {
    let d = big_d(cfg)?;
    let phi = parse_kernel(cfg.get("phi").unwrap_or("bump:1/2:1"))?;
    if !phi.has_compact_support() {
        return Err(CliError::Config("phi must have compact support".into()));
    }
    let (lo, hi) = phi.support();
    let (value, source) = match cache_dir(cfg)? {
        Some(_) => {
            let dhi = (hi * d as f64).ceil() as u64;
            let (entries, info) = class_entries(cfg, dhi)?;
            let dlo = lo * d as f64;
            let v: f64 = entries
                .iter()
                .filter(|e| e.d as f64 >= dlo)
                .map(|e| phi.eval(e.d as f64 / d as f64) * e.torsion[0] as f64)
                .sum();
            (v, info)
        }
        None => (dh_average(d, &phi)?, json!(null)),
    };
    let unit = SmoothTestFunction::sharp();
    let model = asymptotic_model(d, Rational::from_integer(1), 3, &phi, &unit, ModelMode::Conjecture)?;
    let mut result = json!({"D": d, "value": value, "model": model_json(&model, value), "cache": source});
    let mut checks = Vec::new();
    if let Some(c) = band_check(cfg, "ratio to main term", value / model.main)? {
        checks.push(c);
    }
    if cfg.flag("dual")? {
        let eps = cfg.f64_opt("eps")?.unwrap_or(1e-13);
        let r = dual_identity_check(d, &phi, eps)?;
        let tol = cfg.f64_opt("tol.dual_rel")?.unwrap_or(1e-5);
        checks.push(check(
            "class count equals Psi sum",
            r.pass && r.rel_diff <= tol,
            serde_json::to_value(r).expect("serializable"),
        ));
        result.as_object_mut().expect("object").insert("dual".into(), serde_json::to_value(r).expect("serializable"));
    }
    Ok((result, checks))
}

fn parse_edges(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|x| {
            let x = x.trim();
            if x == "inf" {
                Ok(f64::INFINITY)
            } else {
                parse_rational(x).map(y_f64).map_err(|m| CliError::Config(format!("y_edges: {m}")))
            }
        })
        .collect()
}

fn cmd_equidist(cfg: &RunConfig, csv: &mut Option<String>) -> Result<(Value, Vec<Check>), CliError> {
    let d = big_d(cfg)?;
    let ymax = cfg.rational("Y", Rational::from_integer(4))?;
    let nx = cfg.u64_or("nx", 8, 1024)? as u32;
    let edges = match cfg.get("y_edges") {
        Some(s) => parse_edges(s)?,
        None => DEFAULT_EDGES.to_vec(),
    };
    let grid = EquidistGrid::centered(nx, &edges)?;
    let method = methods(cfg, "tuples")[0];
    let h = equidist_histogram(d, ymax, &grid, method)?;
    let min_model = cfg.f64_opt("tol.cell_min_model")?.unwrap_or(500.0);
    let lo = cfg.f64_opt("tol.cell_min_ratio")?;
    let hi = cfg.f64_opt("tol.cell_max_ratio")?;
    let mut text = String::from("x_center,half_width,y0,y1,count,model,ratio\n");
    let mut cells = Vec::new();
    let mut outside_band = Vec::new();
    for (i, c) in h.cells.iter().enumerate() {
        let ratio = c.count as f64 / c.model;
        text.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.cell.x_center, c.cell.half_width, c.cell.y0, c.cell.y1, c.count, c.model, ratio
        ));
        cells.push(json!({"x_center": c.cell.x_center, "y0": c.cell.y0, "y1": c.cell.y1,
                          "count": c.count, "model": c.model, "ratio": ratio}));
        if c.model >= min_model && (lo.is_some_and(|l| ratio < l) || hi.is_some_and(|u| ratio > u)) {
            outside_band.push(i);
        }
    }
    *csv = Some(text);
    let asym: Vec<usize> = (0..h.cells.len())
        .filter(|&i| grid.mirror_of(i).is_some_and(|j| h.cells[i].count != h.cells[j].count))
        .collect();
    let mut checks = vec![check("mirror cells equal", asym.is_empty(), json!({"cells": asym}))];
    if lo.is_some() || hi.is_some() {
        checks.push(check("cells within band", outside_band.is_empty(), json!({"cells": outside_band})));
    }
    Ok((json!({"D": d, "Ymax": ymax.to_string(), "total": h.total, "outside": h.outside, "cells": cells}), checks))
}

fn cmd_constants(cfg: &RunConfig) -> Result<(Value, Vec<Check>), CliError> {
    let precision = cfg.u64_or("precision", ATTAINED_DIGITS, 50)?;
    let cutoff = cfg.u64_or("cutoff", 100_000, MAX_CUTOFF)?;
    if cutoff < 1000 {
        return Err(CliError::Config("cutoff must be at least 1000".into()));
    }
    let mut list: Vec<Value> = constants_report(cutoff)?
        .into_iter()
        .map(|e| json!({"name": e.name, "value": e.value, "err": e.err, "formula": e.formula}))
        .collect();
    let i1 = i_of(num_one())?.re;
    let psi1 = mellin_psi(num_one())?.re;
    list.push(json!({"name": "I(1)", "value": i1, "err": (i1 - PI).abs().max(f64::EPSILON * PI), "formula": "pi"}));
    list.push(json!({"name": "Psi_hat(1)", "value": psi1, "err": (psi1 - PI / 6.0).abs().max(f64::EPSILON),
                     "formula": "pi/6"}));
    let mut result = json!({"digits_requested": precision, "digits_attained": ATTAINED_DIGITS.min(precision),
                            "prime_cutoff": cutoff, "constants": list});
    if precision > ATTAINED_DIGITS {
        result.as_object_mut().expect("object").insert(
            "warning".into(),
            json!(format!("values are binary64; {precision} digits requested, about {ATTAINED_DIGITS} available")),
        );
    }
    let checks = vec![
        check("I(1) = pi", (i1 - PI).abs() <= 1e-10, json!(i1)),
        check("Psi_hat(1) = pi/6", (psi1 - PI / 6.0).abs() <= 1e-10, json!(psi1)),
    ];
    Ok((result, checks))
}

fn num_one() -> num_complex::Complex64 {
    num_complex::Complex64::new(1.0, 0.0)
}

fn cmd_verify(cfg: &RunConfig) -> Result<(Value, Vec<Check>), CliError> {
    let suite = cfg.get("suite").unwrap_or("all");
    let groups = ["arith", "classgroup", "census", "analytic"];
    if suite != "all" && !groups.contains(&suite) {
        return Err(CliError::Config(format!("suite must be all or one of {}", groups.join(", "))));
    }
    let dmax = cfg.u64_or("Dmax", 2000, MAX_VERIFY_D)?;
    let on = |g: &str| suite == "all" || suite == g;
    let mut checks = Vec::new();
    if on("arith") {
        let ds = sieve_discriminants(1, dmax.max(2))?;
        let trial: Vec<u64> = (1..=dmax).filter(|&n| n % 4 == 2 && is_squarefree_trial(n)).collect();
        checks.push(check("sieve matches trial division", ds == trial, json!({"count": ds.len()})));
    }
    if on("classgroup") {
        let entries = compute_entries(dmax, 1)?;
        let bad: Vec<u64> = entries
            .iter()
            .filter(|e| e.torsion.iter().any(|t| t % 2 == 1) || e.h != e.invariants.iter().product::<u64>())
            .map(|e| e.d)
            .collect();
        checks.push(check("class groups consistent", bad.is_empty(), json!({"offending": bad})));
    }
    if on("census") {
        let mut mism = Vec::new();
        for y in [Rational::new(1, 2), Rational::from_integer(1), Rational::from_integer(2)] {
            for k in [3, 5] {
                let a = vertical_census(dmax, y, k, Method::Direct)?.total;
                let b = vertical_census(dmax, y, k, Method::Tuples)?.total;
                if a != b {
                    mism.push(json!({"Y": y.to_string(), "k": k, "direct": a, "tuples": b}));
                }
            }
        }
        checks.push(check("direct and tuple censuses agree", mism.is_empty(), json!(mism)));
        let one = Rational::from_integer(1);
        let sets_equal = direct_ideal_set(dmax, one, 3)? == tuple_ideal_set(dmax, one, 3)?;
        checks.push(check("ideal sets agree", sets_equal, json!(null)));
        let mut viol = Vec::new();
        for k in [3, 5, 7] {
            viol.push(cusp_cutoff_audit(dmax, k)?.len());
        }
        checks.push(check("cusp cutoff", viol.iter().all(|&v| v == 0), json!(viol)));
        let mut worst: f64 = 0.0;
        for f in 1..=3 {
            let h = horizontal_census(dmax, one, f, Method::Tuples)?;
            worst = worst.max(h.total.im.abs() / (h.count as f64).max(1.0));
        }
        checks.push(check("horizontal sums real", worst <= 1e-9, json!(worst)));
        let phi = SmoothTestFunction::bump_on(1.0, 2.0)?;
        let r = dual_identity_check(dmax, &phi, 1e-13)?;
        checks.push(check("class count equals Psi sum", r.pass, serde_json::to_value(r).expect("serializable")));
    }
    if on("analytic") {
        let mut worst: f64 = 0.0;
        for (x, y) in sample_points() {
            worst = worst.max((eisenstein_kernel_sum(x, y, 1e-10)?.value - 0.5).abs());
        }
        checks.push(check("coset sum of Psi is 1/2", worst <= 1e-8, json!(worst)));
        let cs = secondary_constants(3, 100_000)?;
        let f = f_of(1.0 / 3.0, 100_000)?.value;
        let i23 = i_of(num_complex::Complex64::new(2.0 / 3.0, 0.0))?.re;
        let e1 = (f * i23 / 12.0 - cs.c56.value / 2.0).abs();
        let e2 = (cs.c56.value - 1.2 * cs.c1k.value).abs();
        checks.push(check(
            "constant cross identities",
            e1 <= 1e-8 && e2 <= 1e-8 && cs.c56.value < 0.0,
            json!({"f_i_identity": e1, "c56_c13_identity": e2, "c56": cs.c56.value}),
        ));
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    Ok((json!({"suite": suite, "Dmax": dmax, "checks_run": checks.len(), "failed": failed}), checks))
}
