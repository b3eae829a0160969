#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/toy")
}

pub fn golden() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/toy")
}

/// Run the tool in-process, panicking with the arguments on a non-zero exit.
pub fn biotok(args: &[&str]) {
    let mut argv = vec!["biotok"];
    argv.extend_from_slice(args);
    let code = biotok_cli::run(argv);
    assert_eq!(code, 0, "biotok {} exited with {code}", args.join(" "));
}

fn s(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

/// Every stage of the toy pipeline, writing into `out`; returns the wall time.
pub fn run_pipeline(out: &Path) -> Duration {
    let f = fixtures();
    let config = f.join("config.toml");
    let c = ["--config", s(&config)];
    let p = |name: &str| out.join(name);
    let start = Instant::now();

    let stage = |rest: &[&str]| {
        let mut args = c.to_vec();
        args.extend_from_slice(rest);
        biotok(&args);
    };
    stage(&[
        "clean",
        "--input",
        s(&f.join("raw.jsonl")),
        "--out",
        s(&p("clean.jsonl")),
        "--stats-out",
        s(&p("stats.csv")),
        "--drops-out",
        s(&p("drops.jsonl")),
    ]);
    stage(&["train-bpe", "--input", s(&p("clean.jsonl")), "--out", s(&p("vocab"))]);
    stage(&[
        "encode",
        "--vocab",
        s(&p("vocab")),
        "--input",
        s(&p("clean.jsonl")),
        "--out",
        s(&p("encoded.jsonl")),
    ]);
    stage(&[
        "mask",
        "--vocab",
        s(&p("vocab")),
        "--input",
        s(&p("encoded.jsonl")),
        "--out",
        s(&p("masked.jsonl")),
        "--stats-out",
        s(&p("mask_stats.json")),
    ]);
    let analysis = p("analysis");
    stage(&[
        "overlap",
        "--vocab",
        s(&p("vocab")),
        "--task",
        s(&f.join("train.conll")),
        "--task",
        s(&f.join("test.conll")),
        "--out",
        s(&analysis),
    ]);
    stage(&[
        "seg-stats",
        "--vocab",
        s(&p("vocab")),
        "--gold",
        s(&f.join("test.conll")),
        "--out",
        s(&analysis),
    ]);
    stage(&[
        "dissect",
        "--vocab",
        s(&p("vocab")),
        "--gold",
        s(&f.join("test.conll")),
        "--pred",
        s(&f.join("pred.conll")),
        "--out",
        s(&analysis),
    ]);
    stage(&[
        "ner-eval",
        "--gold",
        s(&f.join("test.conll")),
        "--pred",
        s(&f.join("pred.conll")),
        "--out",
        s(&analysis.join("ner.json")),
    ]);
    stage(&["report", "--input", s(&analysis), "--out", s(&p("report"))]);
    start.elapsed()
}

/// Relative path → contents of every file below `root`.
pub fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, into: &mut BTreeMap<String, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, into);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                into.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    let mut files = BTreeMap::new();
    walk(root, root, &mut files);
    files
}

/// Names of files that differ between two trees, including missing ones.
pub fn differences(expected: &BTreeMap<String, Vec<u8>>, actual: &BTreeMap<String, Vec<u8>>) -> Vec<String> {
    let names: std::collections::BTreeSet<&String> = expected.keys().chain(actual.keys()).collect();
    names
        .into_iter()
        .filter(|n| expected.get(*n) != actual.get(*n))
        .cloned()
        .collect()
}

/// Copy `from` over `to`, replacing whatever was there.
pub fn replace_tree(from: &Path, to: &Path) {
    if to.exists() {
        fs::remove_dir_all(to).unwrap();
    }
    for (rel, bytes) in tree(from) {
        let dest = to.join(rel);
        fs::create_dir_all(dest.parent().unwrap()).unwrap();
        fs::write(dest, bytes).unwrap();
    }
}
