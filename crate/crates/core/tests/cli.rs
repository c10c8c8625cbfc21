use std::fs;
use std::path::PathBuf;
use std::process::Command;

use lzpm::harness::cli::cli_main;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lzpm-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> i32 {
    cli_main(std::iter::once("lzpm").chain(args.iter().copied()))
}

fn stdout_of(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_lzpm")).args(args).output().unwrap();
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
}

#[test]
fn compress_round_trip_and_search() {
    let raw = scratch("t.txt");
    let lz = scratch("t.lzpm");
    let back = scratch("t.out");
    fs::write(&raw, "abracadabraabracadabra").unwrap();
    let (raw_s, lz_s, back_s) = (raw.to_str().unwrap(), lz.to_str().unwrap(), back.to_str().unwrap());
    assert_eq!(run(&["compress", raw_s, lz_s]), 0);
    assert_eq!(run(&["decompress", lz_s, back_s]), 0);
    assert_eq!(fs::read(&raw).unwrap(), fs::read(&back).unwrap());

    let (out, code) = stdout_of(&["search", lz_s, "--pattern", "abra", "-k", "0"]);
    assert_eq!(code, 0);
    assert_eq!(out, "4\t0\n11\t0\n15\t0\n22\t0\n");
    let (naive, _) = stdout_of(&["oracle", lz_s, "--pattern", "abra", "-k", "1", "--mode", "edit"]);
    let (paper, _) = stdout_of(&["search", lz_s, "--pattern", "abra", "-k", "1", "--mode", "edit", "--algorithm", "paper"]);
    assert_eq!(naive, paper);
    let (first, code) = stdout_of(&["search", lz_s, "--pattern", "abra", "--report", "first"]);
    assert_eq!((first.as_str(), code), ("4\t0\n", 0));

    let metrics = scratch("m.txt");
    assert_eq!(run(&["search", lz_s, "--pattern", "cad", "--metrics", metrics.to_str().unwrap()]), 0);
    let record = fs::read_to_string(&metrics).unwrap();
    assert!(record.lines().any(|l| l.starts_with("verifications=")));
    assert!(record.lines().all(|l| l.split_once('=').is_some()));
}

#[test]
fn exit_codes() {
    let raw = scratch("e.txt");
    let lz = scratch("e.lzpm");
    fs::write(&raw, "aaaaabbbbb").unwrap();
    let lz_s = lz.to_str().unwrap();
    assert_eq!(run(&["compress", raw.to_str().unwrap(), lz_s]), 0);
    assert_eq!(run(&["search", lz_s, "--pattern", "zzz", "--report", "first"]), 1);
    assert_eq!(run(&["search", lz_s, "--pattern", "zzz"]), 0);
    // malformed input
    assert_eq!(run(&["search", raw.to_str().unwrap(), "--pattern", "a"]), 2);
    assert_eq!(run(&["search", lz_s, "--pattern", ""]), 2);
    assert_eq!(run(&["search", lz_s, "--pattern", "a", "--mode", "levenshtein"]), 2);
    assert_eq!(run(&["decompress", "/nonexistent/file", "x"]), 2);
    assert_eq!(run(&["bench", "--profile", "nope", "--sizes", "100"]), 2);
}

#[test]
fn bench_prints_a_table() {
    let (out, code) = stdout_of(&["bench", "--profile", "planted", "--sizes", "2000,4000", "-m", "32", "-k", "1"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("N\tphrases"));
}
