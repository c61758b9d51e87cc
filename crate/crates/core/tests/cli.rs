//! End-to-end runs of the `hardstrings` binary through files on disk.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hardstrings-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn hs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardstrings"))
        .args(args)
        .env_remove("HARDSTRINGS_SEED")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn hamming_pipeline_through_files() {
    let dir = scratch("hamming");
    let dict = dir.join("dict.txt");
    let text = dir.join("text.txt");
    fs::write(
        &dict,
        "hardstrings-instance 1\nmode=hamming k=1 d=2 count=2 encoding=compact\n01\n11\n",
    )
    .unwrap();

    let o = hs(&["build-text", "--dict", path(&dict), "--out", path(&text)]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let body = fs::read_to_string(&text).unwrap();
    assert_eq!(body.lines().last(), Some("$$#$01$$#$11$$#$"));

    let o = hs(&[
        "query",
        "--text",
        path(&text),
        "--pattern",
        "00",
        "--k",
        "1",
    ]);
    assert_eq!(stdout(&o), "1 1\n");
    let o = hs(&[
        "query",
        "--text",
        path(&text),
        "--pattern",
        "11",
        "--k",
        "0",
    ]);
    assert_eq!(stdout(&o), "2 0\n");
    let o = hs(&[
        "query",
        "--text",
        path(&text),
        "--pattern",
        "10",
        "--k",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "");
}

#[test]
fn generated_dictionary_round_trips_through_transform_and_text() {
    let dir = scratch("gen");
    let dict = dir.join("dict.txt");
    let tdict = dir.join("tdict.txt");
    let text = dir.join("text.txt");

    let o = hs(&[
        "gen",
        "dict",
        "--k",
        "2",
        "--d",
        "8",
        "--count",
        "5",
        "--seed",
        "3",
        "--out",
        path(&dict),
    ]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let body = fs::read_to_string(&dict).unwrap();
    let strings: Vec<&str> = body.lines().skip(2).collect();
    assert!(!strings.is_empty() && strings.iter().all(|s| s.len() == 8));

    let o = hs(&["transform", "--in", path(&dict), "--out", path(&tdict)]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let tbody = fs::read_to_string(&tdict).unwrap();
    assert!(tbody.lines().nth(1).unwrap().contains("mode=edit"));
    assert_eq!(tbody.lines().count(), body.lines().count());

    // a transformed instance is already in edit mode
    let o = hs(&["transform", "--in", path(&tdict)]);
    assert_eq!(o.status.code(), Some(2));

    let o = hs(&["build-text", "--dict", path(&dict), "--out", path(&text)]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    for (i, s) in strings.iter().enumerate() {
        let o = hs(&["query", "--text", path(&text), "--pattern", s, "--k", "0"]);
        let lines = stdout(&o);
        assert!(
            lines.lines().any(|l| l == format!("{} 0", i + 1)),
            "{s}: {lines}"
        );
    }
}

#[test]
fn seed_comes_from_the_environment() {
    let a = hs(&[
        "gen", "base", "--k", "2", "--d", "8", "--count", "4", "--seed", "11",
    ]);
    let b = Command::new(env!("CARGO_BIN_EXE_hardstrings"))
        .args(["gen", "base", "--k", "2", "--d", "8", "--count", "4"])
        .env("HARDSTRINGS_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn gap_files_and_exit_codes() {
    let dir = scratch("gap");
    let gap = dir.join("gap.txt");
    let o = hs(&["gen-gap", "--d", "4", "--out", path(&gap)]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(fs::read_to_string(&gap).unwrap().contains("$$$$#$$#"));

    let o = hs(&[
        "gen-gap",
        "--d",
        "4",
        "--strategy",
        "random",
        "--budget",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(4));

    let o = hs(&["verify", "gap", "--d", "2", "--gap", "$$##"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));

    let o = hs(&[
        "query",
        "--text",
        path(&dir.join("missing.txt")),
        "--pattern",
        "0",
        "--k",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(3));

    assert_eq!(hs(&["bench", "--solver", "quick"]).status.code(), Some(2));
    assert_eq!(hs(&[]).status.code(), Some(2));
}
