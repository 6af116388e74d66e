//! Acceptance gate for the front end: the golden matrix is byte-identical
//! across runs and against the frozen outputs, and exit codes partition
//! into success, domain error, and malformed input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dst"))
        .args(args)
        .stdin(Stdio::null())
        .output()
        .expect("binary runs")
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dst"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    child.stdin.take().expect("piped").write_all(stdin.as_bytes()).expect("stdin accepts");
    child.wait_with_output().expect("binary finishes")
}

/// Subcommands whose golden case is `<name>.in.json` driving `<name>`.
const FILE_CASES: &[&str] = &[
    "rank",
    "embed",
    "oplus",
    "kernel",
    "skeleton",
    "scale",
    "prank",
    "nft",
    "leqn",
    "fuse",
    "eval",
    "dual",
    "encode-field",
    "pair",
    "universal",
    "b2c",
    "restrict",
    "product",
    "separate",
    "reduce",
    "pi-eval",
    "levels",
    "ring-levels",
    "quotient",
    "verify-transcript",
];

fn golden_args(name: &str) -> Vec<String> {
    let dir = fixtures();
    match name {
        "force" => vec![
            "force".into(),
            "--poset".into(),
            dir.join("force-poset.json").display().to_string(),
            "--dense".into(),
            dir.join("force-dense.json").display().to_string(),
            "--extract".into(),
            "silver".into(),
        ],
        "sweep" => vec!["sweep".into(), "--only".into(), "pairing-bijection".into()],
        _ => vec![
            name.into(),
            "--input".into(),
            dir.join(format!("{name}.in.json")).display().to_string(),
        ],
    }
}

#[test]
fn golden_matrix_is_deterministic_and_exact() {
    let mut names: Vec<&str> = FILE_CASES.to_vec();
    names.push("force");
    names.push("sweep");
    for name in names {
        let args: Vec<String> = golden_args(name);
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = run(&argv);
        let second = run(&argv);
        assert!(first.status.success(), "{name}: {}", String::from_utf8_lossy(&first.stderr));
        assert!(first.stderr.is_empty(), "{name} wrote to stderr");
        assert_eq!(first.stdout, second.stdout, "{name} is not deterministic");
        let golden = std::fs::read(fixtures().join(format!("{name}.out.json")))
            .expect("golden file exists");
        assert_eq!(first.stdout, golden, "{name} diverged from its golden output");
    }
    println!(
        "criterion 14 cli-golden           pass  ({} golden cases, byte-identical reruns)",
        FILE_CASES.len() + 2
    );
}

#[test]
fn standard_input_matches_the_file_path() {
    let input = std::fs::read_to_string(fixtures().join("rank.in.json")).unwrap();
    let golden = std::fs::read(fixtures().join("rank.out.json")).unwrap();
    let out = run_with_stdin(&["rank"], &input);
    assert!(out.status.success());
    assert_eq!(out.stdout, golden);
}

#[test]
fn domain_errors_exit_one() {
    let cases: &[(&str, &str)] = &[
        // A kernel with nowhere to split.
        ("skeleton", r#"{"kernel":{"nodes":[[[],[]]]},"k":1}"#),
        // Identical schemes share a full-depth projection.
        (
            "separate",
            r#"{"a":{"nodes":[[[],[]],[[0],[0]]]},"b":{"nodes":[[[],[]],[[0],[0]]]}}"#,
        ),
        // Nothing to fuse.
        ("fuse", r#"{"chain":[]}"#),
        // A generator outside the algebra.
        ("levels", r#"{"algebra":{"atoms":1,"elements":[0,1]},"c":[5]}"#),
    ];
    for (cmd, stdin) in cases {
        let out = run_with_stdin(&[cmd], stdin);
        assert_eq!(out.status.code(), Some(1), "{cmd} on {stdin}");
        assert!(out.stdout.is_empty(), "{cmd} wrote a result despite failing");
        assert!(!out.stderr.is_empty(), "{cmd} failed silently");
    }
}

#[test]
fn malformed_inputs_exit_two() {
    let cases: &[(&str, &str)] = &[
        ("rank", "not json"),
        // Missing the root: rejected while parsing the tree.
        ("rank", "[[0]]"),
        ("embed", r#"{"t":[[]]}"#),
        ("pair", r#"{"n":3}"#),
    ];
    for (cmd, stdin) in cases {
        let out = run_with_stdin(&[cmd], stdin);
        assert_eq!(out.status.code(), Some(2), "{cmd} on {stdin}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
    let unknown = run(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(2));
    let bad_suite = run(&["sweep", "--suite", "everything"]);
    assert_eq!(bad_suite.status.code(), Some(2));
    let bad_extract = {
        let dir = fixtures();
        run(&[
            "force",
            "--poset",
            &dir.join("force-poset.json").display().to_string(),
            "--dense",
            &dir.join("force-dense.json").display().to_string(),
            "--extract",
            "everything",
        ])
    };
    assert_eq!(bad_extract.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stdout.is_empty());
}
