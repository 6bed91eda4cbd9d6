use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn fixture_files() -> Vec<PathBuf> {
    let mut files: Vec<_> = std::fs::read_dir(fixture_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "msr"))
        .collect();
    files.sort();
    assert!(!files.is_empty());
    files
}

fn msrlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msrlab")).args(args).env_remove("MSRLAB_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fixtures_verify_and_certify() {
    for f in fixture_files() {
        let v = msrlab(&["verify", path_str(&f)]);
        assert_eq!(v.status.code(), Some(0), "{}: {}", f.display(), stdout(&v));
        let c = msrlab(&["--json", "certify", path_str(&f)]);
        assert_eq!(c.status.code(), Some(0), "{}", f.display());
        assert_eq!(json(&c)["ok"], true);
    }
}

#[test]
fn fixtures_round_trip_byte_identical() {
    use msrlab::format::CodeFile;
    for f in fixture_files() {
        let text = std::fs::read_to_string(&f).unwrap();
        assert_eq!(CodeFile::parse(&text).unwrap().to_text(), text, "{}", f.display());
    }
}

#[test]
fn corrupted_entry_reports_witness() {
    let text = std::fs::read_to_string(fixture_dir().join("gf5_l2_k2.msr")).unwrap();
    // C u=2 j=1 becomes [[1,1],[1,1]], which is singular
    let bad = text.replacen("C u=2 j=1\n1 1\n0 2\n", "C u=2 j=1\n1 1\n1 1\n", 1);
    assert_ne!(bad, text);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.msr");
    std::fs::write(&path, bad).unwrap();

    let o = msrlab(&["--json", "verify", path_str(&path)]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["mds"]["ok"], false);
    assert_eq!(v["mds"]["witness"]["parity_rows"], serde_json::json!([2]));
    assert_eq!(v["mds"]["witness"]["systematic_cols"], serde_json::json!([1]));
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.msr");
    std::fs::write(&path, "msrcode v1\nfield p=4 m=1\n").unwrap();
    let o = msrlab(&["verify", path_str(&path)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());

    let missing = msrlab(&["verify", path_str(&dir.path().join("nope.msr"))]);
    assert_eq!(missing.status.code(), Some(2));

    let bad_r = msrlab(&["bounds", "--l", "6", "--r", "4"]);
    assert_eq!(bad_r.status.code(), Some(2));
}

#[test]
fn bad_thread_count_exits_2() {
    let o = Command::new(env!("CARGO_BIN_EXE_msrlab"))
        .args(["bounds", "--l", "4", "--r", "2"])
        .env("MSRLAB_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn repair_random_is_exact() {
    for f in fixture_files() {
        let o =
            msrlab(&["--json", "repair", path_str(&f), "--node", "1", "--data", "random", "--seed", "11"]);
        assert_eq!(o.status.code(), Some(0), "{}", f.display());
        let v = json(&o);
        assert_eq!(v["exact"], true);
        assert_eq!(v["downloaded_symbols"], v["optimal_symbols"]);
        assert_eq!(v["original"], v["reconstructed"]);
    }
    // random data without a seed is rejected
    let f = fixture_dir().join("gf5_l2_k2.msr");
    let o = msrlab(&["repair", path_str(&f), "--node", "1", "--data", "random"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bounds_json_example() {
    let o = msrlab(&["--json", "bounds", "--l", "256", "--r", "16", "--compare"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["t"], 1);
    assert_eq!(v["rlog_floor"], 344);
    assert_eq!(v["prior_goparaju_lambda"], 86);
    assert!((v["prior_goparaju_log_real"].as_f64().unwrap() - 1390.7).abs() < 0.5);
}

#[test]
fn search_emits_verifiable_files() {
    let dir = tempfile::tempdir().unwrap();
    let emit = path_str(dir.path());
    let args: Vec<&str> = "search --q 3 --l 2 --r 2 --k 3 --shards 3 --limit 5 --emit".split(' ').collect();
    let o = msrlab(&[args.as_slice(), &[emit]].concat());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut emitted: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    emitted.sort();
    assert_eq!(emitted.len(), 5);
    assert!(emitted[0].ends_with("code-0001.msr"));
    for f in &emitted {
        let v = msrlab(&["verify", path_str(f)]);
        assert_eq!(v.status.code(), Some(0), "{}", f.display());
    }
}

#[test]
fn search_is_shard_independent() {
    let run = |shards: &str| {
        let o =
            msrlab(&["--json", "search", "--q", "3", "--l", "2", "--r", "2", "--k", "2", "--shards", shards]);
        assert_eq!(o.status.code(), Some(0));
        let mut v = json(&o);
        v.as_object_mut().unwrap().remove("shards");
        v
    };
    assert_eq!(run("1"), run("5"));
}
