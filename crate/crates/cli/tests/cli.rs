use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn corrterm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrterm"))
        .args(args)
        .env_remove("CORRTERM_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data_lines(o: &Output) -> Vec<String> {
    stdout(o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[test]
fn dlens_rows() {
    let o = corrterm(&["dlens", "--p", "2", "--q", "1", "--all"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(data_lines(&o), ["0\t1/4", "1\t-1/4"]);
    let o = corrterm(&["dlens", "--p", "49", "--q", "6", "--label", "48"]);
    assert_eq!(data_lines(&o), ["48\t0"]);
}

#[test]
fn dsurgery_and_torsion() {
    let o = corrterm(&[
        "dsurgery",
        "--knot",
        "torus:2,5",
        "--slope",
        "49/6",
        "--label",
        "48",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"][0]["d"], "-2");
    assert_eq!(v["rows"][0]["d_lens"], "0");
    let o = corrterm(&["torsion", "--knot", "torus:3,4"]);
    // Δ = t^3 - t^2 + 1 - t^-2 + t^-3
    assert_eq!(data_lines(&o), ["0\t1", "1\t1", "2\t1", "3\t0"]);
}

#[test]
fn sigma_table() {
    let o = corrterm(&["sigma", "--p", "3", "--table"]);
    assert_eq!(o.status.code(), Some(0));
    let d: Vec<String> = data_lines(&o)
        .iter()
        .map(|l| l.rsplit('\t').next().unwrap().to_string())
        .collect();
    assert_eq!(d, ["0", "0", "0", "-2", "-2", "0", "0"]);
}

#[test]
fn obstruct_exit_codes() {
    let o = corrterm(&["obstruct", "--combo", "1*K3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["d_witness"], "-2");
    assert_eq!(v["obstructed"], true);

    let o = corrterm(&["obstruct", "--combo", "", "--alexander-one"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("obstructed\tfalse"));
}

#[test]
fn errors_are_one_line() {
    for args in [
        vec!["sigma", "--p", "4"],
        vec!["dlens", "--p", "4", "--q", "2"],
        vec!["dsurgery", "--knot", "torus:2,5", "--slope", "5/2"],
        vec!["obstruct", "--combo", "1*K3 +"],
        vec!["sigma", "--p", "3", "--bogus"],
        vec!["dlens", "--p", "x", "--q", "1"],
        vec!["nonsense"],
        vec![],
    ] {
        let o = corrterm(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err = stderr(&o);
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("error: "), "{err}");
        assert!(stdout(&o).is_empty());
    }
    let o = corrterm(&["sigma", "--p", "4"]);
    assert!(stderr(&o).starts_with("error: invalid-kp: "));
}

#[test]
fn version_and_help() {
    let o = corrterm(&["--version"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).trim(),
        format!("corrterm {}", env!("CARGO_PKG_VERSION"))
    );
    let o = corrterm(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for name in ["dlens", "dsurgery", "torsion", "sigma", "obstruct", "cfk"] {
        assert!(stdout(&o).contains(name));
    }
}

#[test]
fn cfk_tensor_compare() {
    let o = corrterm(&[
        "cfk",
        "tensor",
        "--a",
        "staircase:1",
        "--b",
        "staircase:1",
        "--split",
        "--compare",
        "staircase:2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("# compare staircase:2: equal_up_to_acyclic true"));
    let o = corrterm(&[
        "cfk",
        "tensor",
        "--a",
        "staircase:1",
        "--b",
        "unknot",
        "--compare",
        "staircase:2",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cfk_file_source_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = corrterm(&["cfk", "tensor", "--a", "staircase:1", "--b", "staircase:1"]);
    let text: String = stdout(&o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let path = dir.path().join("t.txt");
    std::fs::write(&path, &text).unwrap();
    let source = format!("file:{}", path.display());
    let o = corrterm(&[
        "cfk", "tensor", "--a", &source, "--b", "unknot", "--format", "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["tensor"]["generators"], 9);
    assert_eq!(v["tensor"]["arrows"], 12);
}

#[test]
fn output_is_deterministic_and_json_round_trips() {
    for args in [
        vec![
            "obstruct",
            "--combo",
            "1*K3 + 2*K5 - 1*K8",
            "--format",
            "json",
        ],
        vec!["sigma", "--p", "5", "--table", "--format", "json"],
        vec![
            "cfk",
            "tensor",
            "--a",
            "staircase:1",
            "--b",
            "staircase:2",
            "--split",
            "--format",
            "json",
        ],
    ] {
        let a = stdout(&corrterm(&args));
        let b = stdout(&corrterm(&args));
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", a);
    }
}

fn with_cache(path: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    let p = path.to_str().unwrap();
    all.extend(["--cache", p]);
    corrterm(&all)
}

#[test]
fn cache_hits_match_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.tsv");
    for args in [
        vec!["sigma", "--p", "3", "--table"],
        vec!["obstruct", "--combo", "1*K3 + 1*K5", "--format", "json"],
        vec!["dlens", "--p", "7", "--q", "3"],
        vec![
            "cfk",
            "tensor",
            "--a",
            "staircase:1",
            "--b",
            "staircase:1",
            "--split",
        ],
    ] {
        let fresh = corrterm(&args);
        let first = with_cache(&path, &args);
        let second = with_cache(&path, &args);
        assert_eq!(stdout(&fresh), stdout(&first));
        assert_eq!(stdout(&first), stdout(&second));
        assert_eq!(fresh.status.code(), second.status.code());
        assert!(
            stderr(&first).contains("cache: 0 hit(s), 1 miss(es)"),
            "{}",
            stderr(&first)
        );
        assert!(
            stderr(&second).contains("cache: 1 hit(s), 0 miss(es)"),
            "{}",
            stderr(&second)
        );
    }
}

#[test]
fn cache_skips_corrupt_and_foreign_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.tsv");
    let args = ["dlens", "--p", "5", "--q", "2"];
    let expected = stdout(&corrterm(&args));
    // A wrong value under another version tag must be ignored.
    let wrong = r#"{"p":5,"q":2,"rows":[{"label":0,"d":"99"}]}"#;
    std::fs::write(
        &path,
        format!("not a record\n0.0.0-other\tdlens p=5 q=2 all\t{wrong}\n"),
    )
    .unwrap();
    let o = with_cache(&path, &args);
    assert_eq!(stdout(&o), expected);
    assert!(stderr(&o).contains("line 1 is corrupt"));
    assert!(stderr(&o).contains("0 hit(s)"));
    let o = with_cache(&path, &args);
    assert_eq!(stdout(&o), expected);
    assert!(stderr(&o).contains("1 hit(s)"));
}

#[test]
fn unwritable_cache_warns_and_proceeds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("no-such-dir").join("cache.tsv");
    let args = ["dlens", "--p", "5", "--q", "2"];
    let o = with_cache(&path, &args);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), stdout(&corrterm(&args)));
    assert!(stderr(&o).contains("warning: cache"));
}

#[test]
fn cache_path_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("env-cache.tsv");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_corrterm"))
            .args(["sigma", "--p", "5"])
            .env("CORRTERM_CACHE", &path)
            .output()
            .unwrap()
    };
    run();
    let o = run();
    assert!(stderr(&o).contains("1 hit(s)"));
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .starts_with(env!("CARGO_PKG_VERSION")));
}
