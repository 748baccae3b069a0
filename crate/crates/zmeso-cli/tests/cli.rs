//! End-to-end runs of the experiment driver on the shipped zero table.

use std::path::{Path, PathBuf};
use std::process::Command;

fn zmeso_bin() -> &'static str {
    env!("CARGO_BIN_EXE_zmeso")
}

fn zeros_arg() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/zeros_100k.txt")
        .display()
        .to_string()
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(zmeso_bin()).args(args).output().expect("spawn zmeso")
}

/// Minimal XML well-formedness scan: angle-bracket balance and tag nesting.
fn assert_well_formed_xml(text: &str) {
    assert!(text.starts_with("<?xml"), "missing xml declaration");
    let mut stack: Vec<String> = Vec::new();
    let mut rest = text;
    while let Some(start) = rest.find('<') {
        rest = &rest[start + 1..];
        let end = rest.find('>').expect("unclosed tag");
        let tag = &rest[..end];
        rest = &rest[end + 1..];
        if tag.starts_with('?') || tag.starts_with('!') || tag.ends_with('/') {
            continue;
        }
        if let Some(name) = tag.strip_prefix('/') {
            let open = stack.pop().unwrap_or_else(|| panic!("orphan close tag {name}"));
            assert_eq!(open, name, "mismatched tags");
        } else {
            let name = tag.split_whitespace().next().unwrap().to_string();
            stack.push(name);
        }
    }
    assert!(stack.is_empty(), "unclosed tags: {stack:?}");
}

#[test]
fn fujii_is_bit_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for out in [&out1, &out2] {
        let o = run(&[
            "fujii",
            "--zeros",
            &zeros_arg(),
            "--t",
            "20000",
            "--n",
            "8",
            "--samples",
            "2000",
            "--seed",
            "41",
            "--out",
            &out.display().to_string(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(out1.join("fujii.csv")).unwrap();
    let b = std::fs::read(out2.join("fujii.csv")).unwrap();
    assert_eq!(a, b, "fujii.csv must reproduce bit-identically");
    // the manifest lists the zeros file with its content hash
    let manifest = std::fs::read_to_string(out1.join("manifest.json")).unwrap();
    assert!(manifest.contains("zeros_100k.txt"));
    assert!(manifest.contains("\"seed\": 41"));
}

#[test]
fn meso_clt_columns_match_module_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m");
    let o = run(&[
        "meso-clt",
        "--zeros",
        &zeros_arg(),
        "--t",
        "20000",
        "--n",
        "8",
        "--kmax",
        "4",
        "--samples",
        "1000",
        "--seed",
        "7",
        "--rmt-n",
        "32",
        "--rmt-batches",
        "300",
        "--out",
        &out.display().to_string(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("moments_n8.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "k,empirical,stderr,gaussian,arithmetic,rmt");
    // k = 2 row: gaussian column equals the variance functional; arithmetic
    // column equals the prime-sum prediction, same numbers as the modules
    let row2: Vec<&str> = lines.nth(1).unwrap().split(',').collect();
    assert_eq!(row2[0], "2");
    let gaussian: f64 = row2[3].parse().unwrap();
    let eta = zmeso::testfn::TestFunction::indicator(0.5);
    let v = zmeso::variance_functional(&eta, 8.0);
    assert!((gaussian - v).abs() < 1e-9 * v);
    let arithmetic: f64 = row2[4].parse().unwrap();
    let sieve = zmeso::arith::build_sieve(20_001).unwrap();
    let pm =
        zmeso::arith::predicted_moment(&[eta.clone(), eta], 2.0e4, 8.0, &sieve).unwrap();
    assert!((arithmetic - pm.value).abs() < 1e-9 * pm.value.abs());
    // JSON mirror carries the same field names
    let json = std::fs::read_to_string(out.join("moments_n8.json")).unwrap();
    for field in ["\"k\"", "\"empirical\"", "\"stderr\"", "\"gaussian\"", "\"arithmetic\"", "\"rmt\""] {
        assert!(json.contains(field), "missing {field}");
    }
}

#[test]
fn report_emits_valid_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = run(&[
        "meso-clt",
        "--zeros",
        &zeros_arg(),
        "--t",
        "20000",
        "--n",
        "8",
        "--samples",
        "1000",
        "--seed",
        "3",
        "--rmt-n",
        "16",
        "--rmt-batches",
        "200",
        "--out",
        &out.display().to_string(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&[
        "report",
        "--zeros",
        &zeros_arg(),
        "--n",
        "8",
        "--out",
        &out.display().to_string(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(out.join("hist_n8.svg")).unwrap();
    assert_well_formed_xml(&svg);
    assert!(svg.matches("<rect").count() >= 20, "at least 20 bins");
    assert!(svg.contains("<polyline"), "overlaid normal curve");
    let qq = std::fs::read_to_string(out.join("qq_n8.svg")).unwrap();
    assert_well_formed_xml(&qq);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    let out = dir.path().join("o");
    std::fs::write(
        &cfg_path,
        format!(
            "# experiment config\nzeros = {}\nt = 20000\nn = 8\nsamples = 500\nseed = 9\nout = {}\n",
            zeros_arg(),
            out.display()
        ),
    )
    .unwrap();
    // flag overrides the file's seed
    let o = run(&[
        "fujii",
        "--config",
        &cfg_path.display().to_string(),
        "--seed",
        "10",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 10"), "flag must beat file");
}

#[test]
fn invalid_config_names_the_field() {
    let o = run(&["fujii", "--zeros", "/nonexistent/zeros.txt"]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("zeros"), "error should name the field: {err}");

    let o = run(&["meso-clt", "--zeros", &zeros_arg(), "--kmax", "12"]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("kmax"), "error should name the field: {err}");
}

#[test]
fn ingest_writes_caches() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = run(&[
        "ingest",
        "--zeros",
        &zeros_arg(),
        "--sieve-limit",
        "10000",
        "--out",
        &out.display().to_string(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let zcache = out.join("cache/zeros.zmc");
    let bytes = std::fs::read(&zcache).unwrap();
    assert_eq!(&bytes[..4], b"ZMC1");
    let scache = std::fs::read(out.join("cache/sieve.zsv")).unwrap();
    assert_eq!(&scache[..4], b"ZSV1");
}

#[test]
fn cache_dir_env_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let cache = dir.path().join("elsewhere");
    let o = Command::new(zmeso_bin())
        .env("ZMESO_CACHE_DIR", &cache)
        .args([
            "ingest",
            "--zeros",
            &zeros_arg(),
            "--sieve-limit",
            "1000",
            "--out",
            &out.display().to_string(),
        ])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(cache.join("zeros.zmc").exists());
}

#[test]
fn pwl_knot_file_round_trip(){
    let dir = tempfile::tempdir().unwrap();
    let knots = dir.path().join("tent.csv");
    std::fs::write(&knots, "-1.0,0\n0.0,1.0\n1.0,0\n").unwrap();
    let out = dir.path().join("k");
    let o = run(&[
        "meso-clt",
        "--zeros",
        &zeros_arg(),
        "--t",
        "20000",
        "--n",
        "8",
        "--samples",
        "500",
        "--seed",
        "2",
        "--eta",
        &format!("pwl:{}", knots.display()),
        "--rmt-n",
        "16",
        "--rmt-batches",
        "200",
        "--out",
        &out.display().to_string(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // the knot file participates in the manifest hash list
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("tent.csv"));
}
