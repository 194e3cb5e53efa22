use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const STRNCHR: &str = "if (s[0] == c || s[0] == 0) remove(s,1) else remove(s,0)";
const IS_SORTED: &str = "if (s[n-3] <= s[n-2] <= s[n-1]) remove(s,n-1) else remove(s,n-4)";

fn squeeze(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squeeze"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn file(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

/// The report at `path` with every `seconds` field removed.
fn scrubbed(path: &Path) -> Value {
    fn scrub(v: &mut Value) {
        match v {
            Value::Object(m) => {
                m.remove("seconds");
                m.values_mut().for_each(scrub);
            }
            Value::Array(xs) => xs.iter_mut().for_each(scrub),
            _ => {}
        }
    }
    let mut v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    scrub(&mut v);
    v
}

#[test]
fn check_exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = file(&dir, "good.sqz", STRNCHR);
    let swapped = file(&dir, "swapped.sqz", "if (s[0] == c || s[0] == 0) remove(s,0) else remove(s,1)");
    let broken = file(&dir, "broken.sqz", "if (s[0] == ) remove(s,1)");
    let quick = ["--solver-cmd", "none", "--len-bound", "3"];

    let out = squeeze(&[&["check", "bench:strnchr", &good][..], &quick].concat());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verified"));

    assert_eq!(code(&squeeze(&[&["check", "bench:strnchr", &swapped][..], &quick].concat())), 1);
    assert_eq!(code(&squeeze(&[&["check", "bench:strnchr", &broken][..], &quick].concat())), 2);
    assert_eq!(code(&squeeze(&["check", "bench:no_such", &good])), 2);
    assert_eq!(code(&squeeze(&["check", "bench:strnchr", "/nonexistent/q.sqz"])), 3);
    let missing = squeeze(&["check", "bench:strnchr", &good, "--solver-cmd", "/nonexistent/solver"]);
    assert_eq!(code(&missing), 3);
}

#[test]
fn is_sorted_needs_three_target_steps() {
    let dir = TempDir::new().unwrap();
    let q = file(&dir, "q.sqz", IS_SORTED);
    let base = ["check", "bench:is_sorted", q.as_str(), "--phase", "1"];
    assert_eq!(code(&squeeze(&base)), 1);
    assert_eq!(code(&squeeze(&[&base[..], &["--m-max", "3"]].concat())), 0);
}

#[test]
fn program_files_load_like_bench_names() {
    let dir = TempDir::new().unwrap();
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/src/bench/strnchr.prog");
    let prog = file(&dir, "strnchr.prog", &fs::read_to_string(root).unwrap());
    let q = file(&dir, "q.sqz", STRNCHR);
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let args = ["--phase", "1", "--report"];
    assert_eq!(code(&squeeze(&[&["check", &prog, &q][..], &args, &[a.to_str().unwrap()]].concat())), 0);
    assert_eq!(code(&squeeze(&[&["check", "bench:strnchr", &q][..], &args, &[b.to_str().unwrap()]].concat())), 0);
    let (mut a, mut b) = (scrubbed(&a), scrubbed(&b));
    a["checks"][0]["program"] = Value::Null;
    b["checks"][0]["program"] = Value::Null;
    assert_eq!(a, b);
}

#[test]
fn check_report_matches_golden() {
    let dir = TempDir::new().unwrap();
    let q = file(&dir, "q.sqz", STRNCHR);
    let report = dir.path().join("r.json");
    let out = squeeze(&[
        "check",
        "bench:strnchr",
        &q,
        "--phase",
        "1",
        "--solver-cmd",
        "none",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let golden: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/check_strnchr.json");
    let got = scrubbed(&report);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&golden, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
    }
    let want: Value = serde_json::from_str(&fs::read_to_string(&golden).unwrap()).unwrap();
    assert_eq!(got, want);
}

#[test]
fn synth_survivors_pass_check() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("r.json");
    let flags = ["--solver-cmd", "none", "--len-bound", "4", "--seed", "3"];
    let out = squeeze(&[&["synth", "bench:strnchr"][..], &flags, &["--report", report.to_str().unwrap()]].concat());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = scrubbed(&report);
    let survivors = r["syntheses"][0]["survivors"].as_array().unwrap();
    assert_eq!(survivors.len(), 1);
    let q = file(&dir, "q.sqz", survivors[0]["squeezer"].as_str().unwrap());
    assert_eq!(code(&squeeze(&[&["check", "bench:strnchr", &q][..], &flags].concat())), 0);

    let again = dir.path().join("again.json");
    squeeze(&[&["synth", "bench:strnchr"][..], &flags, &["--report", again.to_str().unwrap()]].concat());
    assert_eq!(scrubbed(&again), r);
}

#[test]
fn empty_pool_exhausts() {
    let dir = TempDir::new().unwrap();
    let pool = file(&dir, "pool.json", "{}");
    let out = squeeze(&["synth", "bench:strnchr", &pool, "--solver-cmd", "none"]);
    assert_eq!(code(&out), 1);
    let bad = file(&dir, "bad.json", r#"{"atoms": ["s[0] =="]}"#);
    assert_eq!(code(&squeeze(&["synth", "bench:strnchr", &bad, "--solver-cmd", "none"])), 2);
}

#[test]
fn emitted_queries_are_stable() {
    let dir = TempDir::new().unwrap();
    let q = file(&dir, "q.sqz", "if (s[n-2] <= s[n-1]) remove(s,n-2) else remove(s,n-1)");
    let emit = |sub: &str| {
        let out = dir.path().join(sub);
        assert_eq!(code(&squeeze(&["emit-vc", "bench:max_ind", &q, out.to_str().unwrap()])), 0);
        let mut files: Vec<(String, String)> = fs::read_dir(&out)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().into_string().unwrap(), fs::read_to_string(e.path()).unwrap())
            })
            .collect();
        files.sort();
        files
    };
    let a = emit("a");
    assert!(!a.is_empty());
    assert!(a.iter().all(|(name, _)| name.ends_with(".smt2")));
    assert!(a.iter().any(|(_, text)| text.contains("(forall")));
    assert_eq!(a, emit("b"));
}
