use heegner_cli::cache::{merge, read_cache, write_cache, CacheDir, CacheEntry, CACHE_ENV};
use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn heegner(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heegner")).args(args).env_remove(CACHE_ENV).output().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}\n{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
    })
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(text.lines().last().unwrap()).unwrap()
}

#[test]
fn vertical_both_methods_match() {
    let o = heegner(&["census-vertical", "D=30", "Y=2", "k=3", "method=both"]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    assert_eq!(j["result"]["direct"], 6);
    assert_eq!(j["result"]["tuples"], 6);
    assert_eq!(j["result"]["match"], true);
    assert_eq!(j["status"], "ok");
    assert!(j["conventions"]["boundary"].as_str().unwrap().contains("1/Y"));
    assert_eq!(j["conventions"]["dh_model_leading_constant"], "2/pi^2");
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        vec!["census-vertical", "D=30", "colour=blue"],
        vec!["census-vertical", "D=30", "k=4"],
        vec!["frobnicate"],
        vec!["census-smoothed", "D=300", "psi=gaussian"],
        vec!["classgroup", "d=25"],
    ] {
        let o = heegner(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let e = stderr_json(&o);
        assert_eq!(e["status"], "error");
        assert_eq!(e["kind"], "config");
    }
}

#[test]
fn main_term_only_flag_allows_other_kernels() {
    let o = heegner(&["census-smoothed", "D=300", "psi=gaussian", "main_term_only=true"]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    assert_eq!(j["result"]["model"]["secondary_certified"], false);
}

#[test]
fn tolerance_failure_exits_one() {
    let o = heegner(&["census-vertical", "D=2000", "method=tuples", "tol.ratio_min=5"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["status"], "fail");
}

#[test]
fn constants_report() {
    let o = heegner(&["constants", "precision=30"]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    let list = j["result"]["constants"].as_array().unwrap();
    let get = |name: &str| list.iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("{name} missing"));
    for name in ["C_5/6", "C_1,3", "C_1,5", "C_1,7", "C_1,9", "F(1/3)", "I(1)", "Psi_hat(1)"] {
        assert!(get(name)["err"].as_f64().unwrap() < 1e-8, "{name}");
    }
    assert!((get("C_5/6")["value"].as_f64().unwrap() + 0.2336972786263727).abs() < 1e-10);
    assert!((get("I(1)")["value"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-10);
    assert!(j["result"]["warning"].is_string());
}

#[test]
fn verify_all_passes() {
    let o = heegner(&["verify", "suite=all", "Dmax=2000"]);
    let j = stdout_json(&o);
    assert_eq!(o.status.code(), Some(0), "{j}");
    assert_eq!(j["result"]["failed"], 0);
}

#[test]
fn config_file_with_override_and_atomic_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "command=census-vertical\nD=30\nY=1\nk=3\nmethod=tuples\n").unwrap();
    let out = dir.path().join("res/summary.json");
    let args = [format!("config={}", cfg.display()), "Y=2".into(), format!("output={}", out.display())];
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = heegner(&args);
    assert_eq!(o.status.code(), Some(0));
    let first = fs::read(&out).unwrap();
    let j: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(j["result"]["total"], 6);
    heegner(&args);
    assert_eq!(fs::read(&out).unwrap(), first);
    assert_eq!(fs::read_dir(out.parent().unwrap()).unwrap().count(), 1);
}

#[test]
fn direct_census_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("records.csv");
    let o = heegner(&["census-vertical", "D=30", "Y=2", "method=direct", &format!("csv={}", csv.display())]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text, "d,h,order_k_classes,hits\n26,6,2,3:-1;3:1;9:-1;9:1;10:-2;10:2\n");
}

fn entries(n: usize) -> Vec<CacheEntry> {
    heegner_core::arith::sieve_discriminants(1, 20_000)
        .unwrap()
        .into_iter()
        .take(n)
        .map(|d| CacheEntry::compute(d, None))
        .collect()
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.csv");
    let es = entries(1000);
    write_cache(&p, &es).unwrap();
    let r = read_cache(&p).unwrap();
    assert!(r.warnings.is_empty());
    assert_eq!(r.entries, es);
}

#[test]
fn cache_entries_recompute_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cache = CacheDir::new(dir.path()).unwrap();
    let (es, _) = cache.ensure(3000, 3).unwrap();
    for e in es.iter().step_by(37) {
        assert_eq!(*e, CacheEntry::compute(e.d, None));
    }
}

#[test]
fn version_mismatch_refused() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("merged.csv"), "# heegner-cache v0\nd,h\n2,1\n").unwrap();
    let o = heegner(&["classgroup", "D=100", &format!("cache={}", dir.path().display())]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert!(e["message"].as_str().unwrap().contains("rebuild"), "{e}");
}

fn tamper(path: &Path, d: u64) {
    // replace the row for d with a sentinel class number that recomputation would never produce
    let text = fs::read_to_string(path).unwrap();
    let prefix = format!("{d},");
    let new: Vec<String> = text
        .lines()
        .map(|l| if l.starts_with(&prefix) { format!("{d},997,997,0,0,0,0") } else { l.to_string() })
        .collect();
    fs::write(path, new.join("\n") + "\n").unwrap();
}

#[test]
fn resume_skips_cached_discriminants() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().display().to_string();
    let o = heegner(&["classgroup", "D=5000", &format!("cache={cache}")]);
    assert_eq!(o.status.code(), Some(0));
    let first = stdout_json(&o);
    let n5000 = first["result"]["cache"]["computed"].as_u64().unwrap();
    assert_eq!(first["result"]["cache"]["reused"], 0);
    let merged = dir.path().join("merged.csv");
    tamper(&merged, 26);

    // an interrupted shard: three complete rows beyond 5000 and a torn fourth
    let extra: Vec<u64> = heegner_core::arith::sieve_discriminants(5001, 5100).unwrap();
    let mut shard = String::from("# heegner-cache v1\nd,h,invariants,k3_count,k5_count,k7_count,k9_count\n");
    for &d in &extra[..3] {
        shard.push_str(&CacheEntry::compute(d, None).to_line());
        shard.push('\n');
    }
    shard.push_str(&format!("{},", extra[3]));
    fs::write(dir.path().join("shard-0000005001-0000010000.csv"), shard).unwrap();

    let o = heegner(&["classgroup", "D=10000", "shards=2", &format!("cache={cache}")]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    assert_eq!(j["result"]["cache"]["reused"].as_u64().unwrap(), n5000 + 3);
    let total = heegner_core::arith::sieve_discriminants(1, 10_000).unwrap().len() as u64;
    assert_eq!(j["result"]["cache"]["computed"].as_u64().unwrap(), total - n5000 - 3);
    assert!(j["result"]["cache"]["warnings"][0].as_str().unwrap().contains("truncated"));
    let text = fs::read_to_string(&merged).unwrap();
    assert!(text.contains("\n26,997,997,0,0,0,0\n"), "cached row was recomputed");
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn sharded_build_equals_sequential() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let o1 = heegner(&["classgroup", "D=6000", "shards=1", &format!("cache={}", a.path().display())]);
    let o2 = heegner(&["classgroup", "D=6000", "shards=2", &format!("cache={}", b.path().display())]);
    assert_eq!(o1.status.code(), Some(0));
    assert_eq!(o2.status.code(), Some(0));
    let x = fs::read(a.path().join("merged.csv")).unwrap();
    let y = fs::read(b.path().join("merged.csv")).unwrap();
    assert_eq!(x, y);

    // merging the two halves in either order gives the same list
    let es = entries(300);
    let (l, r) = es.split_at(120);
    assert_eq!(merge(vec![r.to_vec(), l.to_vec()]).unwrap(), es);
    let mut bad = r.to_vec();
    bad[0].h += 1;
    assert!(merge(vec![r.to_vec(), bad]).is_err());
}

#[test]
fn dh_with_warm_cache_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dh.json");
    let cache = dir.path().join("cache");
    let args = ["dh", "D=3000", &format!("cache={}", cache.display()), &format!("output={}", out.display())];
    assert_eq!(heegner(&args).status.code(), Some(0));
    let cold: Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(heegner(&args).status.code(), Some(0));
    let warm_bytes = fs::read(&out).unwrap();
    assert_eq!(heegner(&args).status.code(), Some(0));
    assert_eq!(fs::read(&out).unwrap(), warm_bytes);
    let warm: Value = serde_json::from_slice(&warm_bytes).unwrap();
    assert_eq!(warm["result"]["cache"]["computed"], 0);
    assert_eq!(cold["result"]["value"], warm["result"]["value"]);

    let plain = stdout_json(&heegner(&["dh", "D=3000"]));
    let a = plain["result"]["value"].as_f64().unwrap();
    let b = warm["result"]["value"].as_f64().unwrap();
    assert!((a - b).abs() <= 1e-12 * a, "{a} vs {b}");
}

#[test]
fn dual_identity_through_cli() {
    let o = heegner(&["dh", "D=1000", "phi=bump:1:2", "dual=true"]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    assert_eq!(j["result"]["dual"]["pass"], true);
}

#[test]
fn equidist_and_horizontal_commands() {
    let o = heegner(&["equidist", "D=3000", "Y=4"]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    let cells = j["result"]["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 56);
    let v = stdout_json(&heegner(&["census-vertical", "D=3000", "Y=4", "method=tuples"]));
    let inside: u64 = cells.iter().map(|c| c["count"].as_u64().unwrap()).sum();
    let outside = j["result"]["outside"].as_u64().unwrap();
    assert_eq!(inside + outside, v["result"]["total"].as_u64().unwrap());

    let o = heegner(&["census-horizontal", "D=3000", "f=2", "method=both"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["status"], "ok");
}

#[test]
fn sieve_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    let o = heegner(&["sieve", "hi=30", &format!("csv={}", csv.display())]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&csv).unwrap(), "d\n2\n6\n10\n14\n22\n26\n30\n");
}
