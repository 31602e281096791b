//! Flat `key=value` run configuration.

use crate::CliError;
use heegner_core::heegner::Rational;
use std::collections::BTreeMap;
use std::fs;

pub const COMMANDS: [&str; 9] = [
    "sieve",
    "classgroup",
    "census-vertical",
    "census-horizontal",
    "census-smoothed",
    "dh",
    "equidist",
    "constants",
    "verify",
];

const KEYS: [&str; 25] = [
    "D",
    "Dmax",
    "Y",
    "cache",
    "csv",
    "cutoff",
    "d",
    "dual",
    "eps",
    "f",
    "hi",
    "k",
    "lo",
    "main_term_only",
    "method",
    "nx",
    "output",
    "phi",
    "precision",
    "psi",
    "shards",
    "suite",
    "y_edges",
    "tol.ratio_min",
    "tol.ratio_max",
];

const TOL_KEYS: [&str; 5] = [
    "tol.cell_min_model",
    "tol.cell_min_ratio",
    "tol.cell_max_ratio",
    "tol.dual_rel",
    "tol.horizontal_max",
];

/// Largest `D` any command accepts.
pub const MAX_D: u64 = 100_000_000;
/// Largest numerator or denominator of `Y`.
const MAX_Y_PART: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: String,
    pub values: BTreeMap<String, String>,
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

fn split_pair(item: &str) -> Result<(String, String), CliError> {
    match item.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => config_err(format!("expected key=value, got `{item}`")),
    }
}

fn known_key(k: &str) -> bool {
    KEYS.contains(&k) || TOL_KEYS.contains(&k)
}

impl RunConfig {
    /// Parses command-line arguments: an optional leading command, then
    /// `key=value` pairs. A `config=PATH` pair loads a file first; pairs on the
    /// command line override it.
    pub fn from_args<S: AsRef<str>>(args: &[S]) -> Result<Self, CliError> {
        let mut command = None;
        let mut pairs = Vec::new();
        let mut file = None;
        for (i, a) in args.iter().enumerate() {
            let a = a.as_ref();
            if i == 0 && !a.contains('=') {
                command = Some(a.to_string());
                continue;
            }
            let (k, v) = split_pair(a)?;
            if k == "config" {
                file = Some(v);
            } else {
                pairs.push((k, v));
            }
        }
        let mut cfg = match file {
            Some(path) => {
                let text = fs::read_to_string(&path)
                    .map_err(|e| CliError::Config(format!("cannot read config file {path}: {e}")))?;
                Self::parse_partial(&text)?
            }
            None => RunConfig { command: String::new(), values: BTreeMap::new() },
        };
        if let Some(c) = command {
            cfg.command = c;
        }
        for (k, v) in pairs {
            if k == "command" {
                cfg.command = v;
            } else {
                cfg.values.insert(k, v);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn parse_partial(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig { command: String::new(), values: BTreeMap::new() };
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = split_pair(line)?;
            if k == "command" {
                cfg.command = v;
            } else if k == "config" {
                return config_err("config files cannot include other config files");
            } else if cfg.values.insert(k.clone(), v).is_some() {
                return config_err(format!("duplicate key `{k}`"));
            }
        }
        Ok(cfg)
    }

    /// Parses the text form produced by [`RunConfig::to_text`].
    pub fn parse_text(text: &str) -> Result<Self, CliError> {
        let cfg = Self::parse_partial(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Normalized text: `command=…` first, then keys in sorted order.
    pub fn to_text(&self) -> String {
        let mut s = format!("command={}\n", self.command);
        for (k, v) in &self.values {
            s.push_str(&format!("{k}={v}\n"));
        }
        s
    }

    fn validate(&self) -> Result<(), CliError> {
        if !COMMANDS.contains(&self.command.as_str()) {
            return config_err(format!("unknown command `{}`; expected one of {}", self.command, COMMANDS.join(", ")));
        }
        for k in self.values.keys() {
            if !known_key(k) {
                return config_err(format!("unknown key `{k}`"));
            }
        }
        for key in ["D", "Dmax", "hi", "lo", "d"] {
            self.u64_opt(key, MAX_D)?;
        }
        if self.values.contains_key("Y") {
            self.rational("Y", Rational::from_integer(1))?;
        }
        if self.values.contains_key("k") {
            self.k(3)?;
        }
        if self.values.contains_key("f") {
            self.f()?;
        }
        self.u64_opt("shards", 256)?;
        if self.values.get("shards").is_some_and(|s| s == "0") {
            return config_err("shards must be positive");
        }
        for key in ["main_term_only", "dual"] {
            self.flag(key)?;
        }
        for key in ["eps"].into_iter().chain(TOL_KEYS).chain(["tol.ratio_min", "tol.ratio_max"]) {
            if let Some(v) = self.f64_opt(key)? {
                if !v.is_finite() || v < 0.0 {
                    return config_err(format!("{key} must be a finite nonnegative number"));
                }
            }
        }
        if let Some(m) = self.values.get("method") {
            if !["direct", "tuples", "both"].contains(&m.as_str()) {
                return config_err(format!("method must be direct, tuples or both, got `{m}`"));
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn u64_opt(&self, key: &str, max: u64) -> Result<Option<u64>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => {
                let x: u64 = v
                    .replace('_', "")
                    .parse()
                    .or_else(|_| parse_sci(v))
                    .map_err(|_| CliError::Config(format!("{key} must be a nonnegative integer, got `{v}`")))?;
                if x > max {
                    return config_err(format!("{key} = {x} exceeds the limit {max}"));
                }
                Ok(Some(x))
            }
        }
    }

    pub fn u64_or(&self, key: &str, default: u64, max: u64) -> Result<u64, CliError> {
        Ok(self.u64_opt(key, max)?.unwrap_or(default))
    }

    pub fn u64_req(&self, key: &str, max: u64) -> Result<u64, CliError> {
        self.u64_opt(key, max)?.ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| CliError::Config(format!("{key} must be a number, got `{v}`"))),
        }
    }

    pub fn rational(&self, key: &str, default: Rational) -> Result<Rational, CliError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => parse_rational(v).map_err(|m| CliError::Config(format!("{key}: {m}"))),
        }
    }

    pub fn k(&self, default: u64) -> Result<u64, CliError> {
        let k = self.u64_or("k", default, 9)?;
        if k < 3 || k % 2 == 0 {
            return config_err(format!("k must be odd with 3 <= k <= 9, got {k}"));
        }
        Ok(k)
    }

    pub fn f(&self) -> Result<i64, CliError> {
        let v = self.values.get("f").map(String::as_str).unwrap_or("1");
        let f: i64 = v.parse().map_err(|_| CliError::Config(format!("f must be an integer, got `{v}`")))?;
        if f == 0 || f.unsigned_abs() > 1_000_000 {
            return config_err("f must be a nonzero integer with |f| <= 10^6");
        }
        Ok(f)
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.values.get(key).map(String::as_str) {
            None | Some("false") | Some("0") | Some("no") => Ok(false),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some(v) => config_err(format!("{key} must be true or false, got `{v}`")),
        }
    }
}

fn parse_sci(v: &str) -> Result<u64, ()> {
    // forms like 1e6
    let (m, e) = v.split_once(['e', 'E']).ok_or(())?;
    let m: u64 = m.parse().map_err(|_| ())?;
    let e: u32 = e.parse().map_err(|_| ())?;
    10u64.checked_pow(e).and_then(|p| p.checked_mul(m)).ok_or(())
}

/// Parses `p`, `p/q` or a finite decimal into a positive rational.
pub fn parse_rational(v: &str) -> Result<Rational, String> {
    let bad = || format!("expected a positive rational such as 2, 1/2 or 0.25, got `{v}`");
    let r = if let Some((p, q)) = v.split_once('/') {
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        Rational::new(p, q)
    } else if let Some((ip, fp)) = v.split_once('.') {
        if fp.len() > 6 || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = 10u64.pow(fp.len() as u32);
        let ip: u64 = if ip.is_empty() { 0 } else { ip.parse().map_err(|_| bad())? };
        let fp: u64 = if fp.is_empty() { 0 } else { fp.parse().map_err(|_| bad())? };
        Rational::new(ip.checked_mul(scale).and_then(|x| x.checked_add(fp)).ok_or_else(bad)?, scale)
    } else {
        Rational::from_integer(v.trim().parse().map_err(|_| bad())?)
    };
    if *r.numer() == 0 {
        return Err(bad());
    }
    if *r.numer() > MAX_Y_PART || *r.denom() > MAX_Y_PART {
        return Err(format!("`{v}` is outside the supported range (numerator and denominator at most 2^20)"));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_line_overrides_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "# census\ncommand=census-vertical\nD=30\nY=1\nk=3\n").unwrap();
        let cfg = RunConfig::from_args(&[format!("config={}", path.display()), "Y=2".into()]).unwrap();
        assert_eq!(cfg.command, "census-vertical");
        assert_eq!(cfg.get("Y"), Some("2"));
        assert_eq!(cfg.get("D"), Some("30"));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::from_args(&["sieve", "hi=30", "colour=red"]).is_err());
        assert!(RunConfig::from_args(&["census-vertical", "k=4"]).is_err());
        assert!(RunConfig::from_args(&["census-vertical", "Y=0"]).is_err());
        assert!(RunConfig::from_args(&["census-vertical", "D=1000000000000"]).is_err());
        assert!(RunConfig::from_args(&["nonsense"]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let cfg = RunConfig::from_args(&["census-vertical", "k=3", "D=30", "Y=1/2", "method=both"]).unwrap();
        let text = cfg.to_text();
        assert_eq!(text, "command=census-vertical\nD=30\nY=1/2\nk=3\nmethod=both\n");
        assert_eq!(RunConfig::parse_text(&text).unwrap(), cfg);
        assert_eq!(RunConfig::parse_text(&text).unwrap().to_text(), text);
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("0.25").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational("3/6").unwrap(), Rational::new(1, 2));
        assert_eq!(parse_rational("5").unwrap(), Rational::from_integer(5));
        assert!(parse_rational("-1").is_err());
        assert!(parse_rational("1/0").is_err());
    }
}
