use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use graceful_core::format::{parse_edge_list, parse_labeling, parse_matrix, write_matrix};
use graceful_core::labeling::verify;
use graceful_core::matrix::canonical_biadjacency;

fn fixture(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect()
}

fn text(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graceful"))
        .args(args)
        .env_remove("GRACEFUL_BUDGET_SECS")
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn verify_exit_codes() {
    let (g, f) = (fixture("tree9.edges"), fixture("tree9.labels"));
    assert_eq!(run(&["verify", p(&g), p(&f)]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let tampered = dir.path().join("bad.labels");
    let swapped = text("tree9.labels").replace("\n0 0\n", "\n0 X\n").replace("\n1 1\n", "\n1 0\n").replace("X", "1");
    std::fs::write(&tampered, swapped).unwrap();
    let out = run(&["verify", p(&g), p(&tampered)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("share edge label"), "{}", stderr(&out));

    assert_eq!(run(&["verify", "missing.edges", p(&f)]).status.code(), Some(2));
    let alpha = run(&["verify", p(&fixture("lobster28.edges")), p(&fixture("lobster28.labels")), "--alpha"]);
    assert!(stdout(&alpha).contains("critical number 14"));
}

#[test]
fn matrix_bytes() {
    let out = run(&["matrix", p(&fixture("tree9.edges")), p(&fixture("tree9.labels"))]);
    assert_eq!(stdout(&out), text("tree9_adjacency.matrix"));
    let out = run(&["matrix", p(&fixture("lobster28.edges")), p(&fixture("lobster28.labels")), "--biadjacency"]);
    assert_eq!(stdout(&out), text("lobster28_biadjacency.matrix"));
    let beta = run(&["matrix", p(&fixture("tree9.edges")), p(&fixture("tree9.labels")), "--biadjacency"]);
    assert_eq!(beta.status.code(), Some(3));
    let rotated = run(&["matrix", p(&fixture("lobster28.edges")), p(&fixture("lobster28.labels")), "--transform", "RT"]);
    assert_eq!(rotated.status.code(), Some(0));
    assert!(parse_matrix(&stdout(&rotated)).is_ok());
}

#[test]
fn shift_command() {
    let a = fixture("lobster26_biadjacency.matrix");
    let out = run(&["shift", p(&a), p(&fixture("lobster26.moves"))]);
    assert_eq!(out.status.code(), Some(0));
    let expected = format!("{}lobster; no class flags\n", text("lobster26_shifted.matrix"));
    assert_eq!(stdout(&out), expected);

    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("none.moves");
    std::fs::write(&empty, "").unwrap();
    let echo = run(&["shift", p(&a), p(&empty)]);
    assert!(stdout(&echo).starts_with(&text("lobster26_biadjacency.matrix")));

    let clash = dir.path().join("clash.moves");
    std::fs::write(&clash, "1 21 -> 0 25\n").unwrap();
    assert_eq!(run(&["shift", p(&a), p(&clash)]).status.code(), Some(1));
    let lone = dir.path().join("lone.moves");
    std::fs::write(&lone, "1 21 -> 1 17\n").unwrap();
    let out = run(&["shift", p(&a), p(&lone)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("diagonals"), "{}", stderr(&out));
}

#[test]
fn dot_export() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("k2.edges");
    let f = dir.path().join("k2.labels");
    std::fs::write(&g, "2 1\n0 1\n").unwrap();
    std::fs::write(&f, "kind beta\n0 0\n1 1\n").unwrap();
    let out = stdout(&run(&["export-dot", p(&g), p(&f)]));
    assert_eq!(out, "graph G {\n  0 [label=\"0\"];\n  1 [label=\"1\"];\n  0 -- 1 [label=\"1\"];\n}\n");
    let bare = stdout(&run(&["export-dot", p(&g)]));
    assert!(!bare.contains("label"));

    let lobster = stdout(&run(&["export-dot", p(&fixture("lobster28.edges")), p(&fixture("lobster28.labels"))]));
    for l in 0..=27 {
        assert!(lobster.contains(&format!("[label=\"{l}\"];")));
    }
    assert_eq!(lobster.matches(" -- ").count(), 27);
}

#[test]
fn label_writes_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("cert");
    let out = run(&["label", p(&fixture("lobster28.edges")), "--out", p(&out_dir)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("route: pairwise-balanced"));
    let g = parse_edge_list(&std::fs::read_to_string(out_dir.join("graph.edges")).unwrap()).unwrap();
    let f = parse_labeling(&std::fs::read_to_string(out_dir.join("labeling.labels")).unwrap()).unwrap();
    let m = std::fs::read_to_string(out_dir.join("matrix.matrix")).unwrap();
    assert!(verify(&g, &f).ok);
    // Matrix files carry labels only, so compare bytes.
    assert_eq!(write_matrix(&canonical_biadjacency(&g, &f).unwrap()), m);
}

#[test]
fn label_reports_uncovered_trees() {
    let dir = tempfile::tempdir().unwrap();
    let shifted = dir.path().join("shifted.edges");
    let out = run(&["shift", p(&fixture("lobster26_biadjacency.matrix")), p(&fixture("lobster26.moves"))]);
    let a = parse_matrix(&stdout(&out).lines().take(16).collect::<Vec<_>>().join("\n")).unwrap();
    let (t, _) = graceful_core::matrix::matrix_to_graph(&a).unwrap();
    std::fs::write(&shifted, graceful_core::format::write_edge_list(&t)).unwrap();
    let out = run(&["label", p(&shifted)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("pairwise-linked"));
    let similar = run(&["label", p(&shifted), "--strategy", "similar"]);
    assert!(stderr(&similar).contains("not isomorphic"));
}

#[test]
fn construct_double() {
    let dir = tempfile::tempdir().unwrap();
    let input = format!("{}:{}", p(&fixture("tree9.edges")), p(&fixture("tree9.labels")));
    let out = run(&["construct", "double", "--inputs", &input, "--at", "8", "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("double: 18 vertices, 17 edges, alpha with critical number 8\n"));
    assert_eq!(std::fs::read_to_string(dir.path().join("matrix.matrix")).unwrap(), text("tree9_double.matrix"));
    let missing_at = run(&["construct", "double", "--inputs", &input]);
    assert_eq!(missing_at.status.code(), Some(2));
    let lobster = run(&["construct", "balanced-lobster", "--x", "2,2,3", "--y", "3,3,2", "--s1", "3", "--s2", "2"]);
    assert!(stdout(&lobster).ends_with(&text("lobster28_biadjacency.matrix")));
    let unbalanced = run(&["construct", "balanced-lobster", "--x", "2", "--y", "3"]);
    assert_eq!(unbalanced.status.code(), Some(1));
}

#[test]
fn search_and_budgets() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = dir.path().join("c5.edges");
    std::fs::write(&c5, "5 5\n0 1\n1 2\n2 3\n3 4\n4 0\n").unwrap();
    assert_eq!(run(&["search", p(&c5)]).status.code(), Some(1));
    let k2 = dir.path().join("k2.edges");
    std::fs::write(&k2, "2 1\n0 1\n").unwrap();
    assert_eq!(stdout(&run(&["search", p(&k2), "--count"])), "2\n");
    let found = run(&["search", p(&fixture("tree9.edges")), "--alpha"]);
    assert_eq!(found.status.code(), Some(0));
    assert!(stdout(&found).contains("critical"));

    let bad_env = Command::new(env!("CARGO_BIN_EXE_graceful"))
        .args(["search", p(&k2)])
        .env("GRACEFUL_BUDGET_SECS", "soon")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
    let big = run(&["search", p(&fixture("lobster26.edges"))]);
    assert_eq!(big.status.code(), Some(1));
    assert!(stderr(&big).contains("exceeds the limit"));
}

#[test]
fn json_is_stable() {
    let file = fixture("lobster26.edges");
    let args = ["--format", "json", "classify", p(&file)];
    let (a, b) = (stdout(&run(&args)), stdout(&run(&args)));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["classification"]["pairwise_trivially_balanced"], true);
    let err: serde_json::Value = serde_json::from_str(&stdout(&run(&["--format", "json", "verify", "missing", "missing"]))).unwrap();
    assert_eq!(err["exit_code"], 2);
}
