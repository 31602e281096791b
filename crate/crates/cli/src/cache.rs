//! Versioned CSV cache of class-group invariants, one row per `d`.

use crate::output::write_atomic;
use crate::CliError;
use heegner_core::arith::{sieve_discriminants, Discriminant, SpfTable};
use heegner_core::classgroup::class_group_with;
use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const CACHE_VERSION: u32 = 1;
pub const CACHE_HEADER: &str = "# heegner-cache v1";
pub const CSV_COLUMNS: &str = "d,h,invariants,k3_count,k5_count,k7_count,k9_count";
/// Environment variable naming the default cache root.
pub const CACHE_ENV: &str = "HEEGNER_CACHE_DIR";

const MERGED: &str = "merged.csv";
const FLUSH_EVERY: usize = 64;

/// Class-group data for one discriminant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheEntry {
    pub d: u64,
    pub h: u64,
    /// Invariant factors `n_1 | n_2 | …`; empty for the trivial group.
    pub invariants: Vec<u64>,
    /// Classes of order exactly 3, 5, 7, 9.
    pub torsion: [u64; 4],
}

impl CacheEntry {
    pub fn compute(d: u64, spf: Option<&SpfTable>) -> Self {
        let g = class_group_with(Discriminant::new_unchecked(d), spf);
        let mut torsion = [0u64; 4];
        for (slot, k) in torsion.iter_mut().zip([3u64, 5, 7, 9]) {
            *slot = g.order_of.iter().filter(|&&o| o == k).count() as u64;
        }
        CacheEntry { d, h: g.h, invariants: g.structure, torsion }
    }

    pub fn to_line(&self) -> String {
        let inv: Vec<String> = self.invariants.iter().map(u64::to_string).collect();
        let t = self.torsion;
        format!("{},{},{},{},{},{},{}", self.d, self.h, inv.join(";"), t[0], t[1], t[2], t[3])
    }

    pub fn parse_line(line: &str) -> Option<Self> {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return None;
        }
        let num = |s: &str| s.parse::<u64>().ok();
        let invariants = if f[2].is_empty() {
            Vec::new()
        } else {
            f[2].split(';').map(num).collect::<Option<Vec<_>>>()?
        };
        let e = CacheEntry {
            d: num(f[0])?,
            h: num(f[1])?,
            invariants,
            torsion: [num(f[3])?, num(f[4])?, num(f[5])?, num(f[6])?],
        };
        (e.invariants.iter().product::<u64>() == e.h).then_some(e)
    }
}

/// Result of reading one cache file.
#[derive(Debug, Default)]
pub struct ReadReport {
    pub entries: Vec<CacheEntry>,
    pub warnings: Vec<String>,
}

fn version_hint(found: &str, path: &Path) -> CliError {
    CliError::Config(format!(
        "{} has header `{found}`, this build reads `{CACHE_HEADER}`; move the old cache aside and rebuild it with \
         `heegner classgroup D=<max d> cache=<dir>`",
        path.display()
    ))
}

/// Reads a cache file. A trailing record cut off mid-write is removed from
/// the file and reported as a warning; any other malformed row is an error.
pub fn read_cache(path: &Path) -> Result<ReadReport, CliError> {
    let text = fs::read_to_string(path)?;
    let mut report = ReadReport::default();
    let mut lines = text.split_inclusive('\n');
    let mut offset = 0usize;
    match lines.next() {
        None => return Ok(report),
        Some(h) if h.trim_end() == CACHE_HEADER => offset += h.len(),
        Some(h) if h.starts_with("# heegner-cache") && h.ends_with('\n') => return Err(version_hint(h.trim_end(), path)),
        Some(h) if !h.ends_with('\n') && CACHE_HEADER.starts_with(h) => {
            truncate(path, 0, &mut report)?;
            return Ok(report);
        }
        Some(h) => return Err(version_hint(h.trim_end(), path)),
    }
    let rest: Vec<&str> = lines.collect();
    for (i, raw) in rest.iter().enumerate() {
        let last = i + 1 == rest.len();
        let line = raw.trim_end_matches('\n');
        if line == CSV_COLUMNS {
            offset += raw.len();
            continue;
        }
        match CacheEntry::parse_line(line) {
            Some(e) if raw.ends_with('\n') => report.entries.push(e),
            _ if last => {
                truncate(path, offset, &mut report)?;
                break;
            }
            _ => {
                return Err(CliError::Integrity(format!(
                    "{}: malformed record at line {}: `{line}`",
                    path.display(),
                    i + 2
                )))
            }
        }
        offset += raw.len();
    }
    Ok(report)
}

fn truncate(path: &Path, len: usize, report: &mut ReadReport) -> Result<(), CliError> {
    let f = OpenOptions::new().write(true).open(path)?;
    f.set_len(len as u64)?;
    report.warnings.push(format!("{}: truncated a partial trailing record", path.display()));
    Ok(())
}

pub fn cache_text(entries: &[CacheEntry]) -> String {
    let mut s = format!("{CACHE_HEADER}\n{CSV_COLUMNS}\n");
    for e in entries {
        s.push_str(&e.to_line());
        s.push('\n');
    }
    s
}

/// Writes a complete cache file atomically.
pub fn write_cache(path: &Path, entries: &[CacheEntry]) -> Result<(), CliError> {
    write_atomic(path, cache_text(entries).as_bytes())
}

/// Append-only writer for one shard.
pub struct ShardWriter {
    out: BufWriter<File>,
    pending: usize,
}

impl ShardWriter {
    pub fn open(path: &Path) -> Result<Self, CliError> {
        let fresh = !path.exists() || fs::metadata(path)?.len() == 0;
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let mut out = BufWriter::new(file);
        if fresh {
            writeln!(out, "{CACHE_HEADER}\n{CSV_COLUMNS}")?;
        }
        Ok(ShardWriter { out, pending: 0 })
    }

    pub fn append(&mut self, e: &CacheEntry) -> Result<(), CliError> {
        writeln!(self.out, "{}", e.to_line())?;
        self.pending += 1;
        if self.pending >= FLUSH_EVERY {
            self.out.flush()?;
            self.pending = 0;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.out.flush()?;
        Ok(())
    }
}

/// Concatenates entry lists, sorted by `d`. The same `d` appearing twice with
/// different fields is an integrity error.
pub fn merge(parts: Vec<Vec<CacheEntry>>) -> Result<Vec<CacheEntry>, CliError> {
    let mut map: BTreeMap<u64, CacheEntry> = BTreeMap::new();
    for e in parts.into_iter().flatten() {
        if let Some(old) = map.get(&e.d) {
            if *old != e {
                return Err(CliError::Integrity(format!("conflicting cache rows for d = {}", e.d)));
            }
        } else {
            map.insert(e.d, e);
        }
    }
    Ok(map.into_values().collect())
}

/// Statistics of [`CacheDir::ensure`].
#[derive(Debug, Default)]
pub struct EnsureReport {
    pub computed: u64,
    pub reused: u64,
    pub warnings: Vec<String>,
}

/// A cache directory: `merged.csv` plus `shard-<lo>-<hi>.csv` files left by
/// interrupted runs.
pub struct CacheDir {
    pub root: PathBuf,
}

impl CacheDir {
    pub fn new(root: impl Into<PathBuf>) -> Result<Self, CliError> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(CacheDir { root })
    }

    pub fn merged_path(&self) -> PathBuf {
        self.root.join(MERGED)
    }

    fn shard_paths(&self) -> Result<Vec<PathBuf>, CliError> {
        let mut v: Vec<PathBuf> = fs::read_dir(&self.root)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("shard-") && n.ends_with(".csv"))
            })
            .collect();
        v.sort();
        Ok(v)
    }

    /// Every cached entry, with warnings from truncated shards.
    pub fn load(&self) -> Result<(Vec<CacheEntry>, Vec<String>), CliError> {
        let mut parts = Vec::new();
        let mut warnings = Vec::new();
        let merged = self.merged_path();
        let mut paths = self.shard_paths()?;
        if merged.exists() {
            paths.insert(0, merged);
        }
        for p in paths {
            let r = read_cache(&p)?;
            warnings.extend(r.warnings);
            parts.push(r.entries);
        }
        Ok((merge(parts)?, warnings))
    }

    /// Makes sure every discriminant `d <= hi` is cached, computing missing
    /// ones over `shards` contiguous intervals, then merges all shards into
    /// `merged.csv`. Returns the entries with `d <= hi`.
    pub fn ensure(&self, hi: u64, shards: usize) -> Result<(Vec<CacheEntry>, EnsureReport), CliError> {
        let (cached, warnings) = self.load()?;
        let have: std::collections::BTreeSet<u64> = cached.iter().map(|e| e.d).collect();
        let all = if hi >= 2 { sieve_discriminants(1, hi)? } else { Vec::new() };
        let missing: Vec<u64> = all.iter().copied().filter(|d| !have.contains(d)).collect();
        let report =
            EnsureReport { computed: missing.len() as u64, reused: (all.len() - missing.len()) as u64, warnings };
        let mut parts = vec![cached];
        if !missing.is_empty() {
            let spf = SpfTable::new(hi + hi / 3 + 2);
            let chunk = missing.len().div_ceil(shards.max(1));
            let results: Vec<Result<Vec<CacheEntry>, CliError>> = std::thread::scope(|s| {
                let handles: Vec<_> = missing
                    .chunks(chunk)
                    .map(|ds| {
                        let spf = &spf;
                        let path = self.root.join(format!("shard-{:010}-{:010}.csv", ds[0], ds[ds.len() - 1]));
                        s.spawn(move || -> Result<Vec<CacheEntry>, CliError> {
                            let mut w = ShardWriter::open(&path)?;
                            let mut out = Vec::with_capacity(ds.len());
                            for &d in ds {
                                let e = CacheEntry::compute(d, Some(spf));
                                w.append(&e)?;
                                out.push(e);
                            }
                            w.finish()?;
                            Ok(out)
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("shard worker panicked")).collect()
            });
            for r in results {
                parts.push(r?);
            }
        }
        let merged = merge(parts)?;
        let shard_files = self.shard_paths()?;
        if !missing.is_empty() || !shard_files.is_empty() || !self.merged_path().exists() {
            write_cache(&self.merged_path(), &merged)?;
            for p in shard_files {
                fs::remove_file(p)?;
            }
        }
        let in_range = merged.into_iter().filter(|e| e.d <= hi).collect();
        Ok((in_range, report))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_round_trip() {
        let e = CacheEntry::compute(26, None);
        assert_eq!(e.to_line(), "26,6,6,2,0,0,0");
        assert_eq!(CacheEntry::parse_line(&e.to_line()), Some(e));
        let t = CacheEntry::compute(2, None);
        assert_eq!(t.to_line(), "2,1,,0,0,0,0");
        assert_eq!(CacheEntry::parse_line("2,1,,0,0,0"), None);
        assert_eq!(CacheEntry::parse_line("26,6,4,2,0,0,0"), None);
    }
}
