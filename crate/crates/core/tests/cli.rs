mod common;

use std::fs;
use std::path::Path;

use archlint::cli::run_with_color;
use archlint::report::dot_syntax::parse_dot;
use common::corpus_root;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["archlint"];
    argv.extend_from_slice(args);
    let code = run_with_color(argv, false, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn extract_of_empty_directory_is_empty_and_clean() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run(&["extract", p(dir.path())]);
    assert_eq!(code, 0);
    assert_eq!(out, "");
}

#[test]
fn missing_input_is_an_io_failure() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope");
    let (code, _, err) = run(&["extract", p(&missing)]);
    assert_eq!(code, 3);
    assert!(err.contains("nope"), "{err}");
}

#[test]
fn unknown_name_in_constraints_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let cc = dir.path().join("bad.cc");
    fs::write(&cc, "hideScope('Nowhere').\n").unwrap();
    let src = corpus_root().join("imagemgr");
    let (code, out, err) = run(&["check", p(&src), "--constraints", p(&cc)]);
    assert_eq!(code, 2);
    assert_eq!(out, "");
    assert!(err.contains("Nowhere"), "{err}");
}

#[test]
fn check_reports_and_exits_1() {
    let src = corpus_root().join("imagemgr");
    let cc = src.join("hideScope.cc");
    let (code, out, _) = run(&["check", p(&src), "--constraints", p(&cc)]);
    assert_eq!(code, 1);
    assert_eq!(out.lines().filter(|l| l.starts_with("VIOLATION")).count(), 6);

    let (code, out, _) = run(&["check", p(&src), "--constraints", p(&cc), "--format", "structured"]);
    assert_eq!(code, 1);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["violations"].as_array().unwrap().len(), 6);
}

#[test]
fn facts_and_sources_give_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let src = corpus_root().join("imagemgr");
    let cc = src.join("hideScope.cc");
    let facts = dir.path().join("g.facts");
    assert_eq!(run(&["extract", p(&src), "--out", p(&facts)]).0, 0);
    let direct = run(&["check", p(&src), "--constraints", p(&cc)]);
    let via = run(&["check", "--facts", p(&facts), "--constraints", p(&cc)]);
    assert_eq!(direct, via);
}

#[test]
fn graph_with_and_without_constraints() {
    let src = corpus_root().join("imagemgr");
    let cc = src.join("hideScope.cc");
    let (code, plain, _) = run(&["graph", p(&src)]);
    assert_eq!(code, 0);
    let plain = parse_dot(&plain).unwrap();
    assert_eq!(plain.edges_with("color", "red").count(), 0);

    let (code, marked, _) = run(&["graph", p(&src), "--constraints", p(&cc)]);
    assert_eq!(code, 1);
    let marked = parse_dot(&marked).unwrap();
    assert_eq!(marked.edges_with("color", "red").count(), 6);
    assert_eq!(marked.nodes, plain.nodes);

    let (_, blue, _) = run(&["graph", p(&src), "--constraints", p(&cc), "--violation-color", "blue"]);
    assert_eq!(parse_dot(&blue).unwrap().edges_with("color", "blue").count(), 6);
}

#[test]
fn graph_filter_limits_the_drawing() {
    let src = corpus_root().join("imagemgr");
    let (code, out, _) = run(&["graph", p(&src), "--filter", "ImageDoc"]);
    assert_eq!(code, 0);
    let d = parse_dot(&out).unwrap();
    assert!(d.nodes.contains("ImageDoc.getName()"));
    assert!(!d.nodes.contains("ImageMgr"));
    assert!(d.edges.iter().all(|e| e.to.starts_with("ImageDoc")));

    let (code, _, err) = run(&["graph", p(&src), "--filter", "Nowhere"]);
    assert_eq!(code, 2);
    assert!(err.contains("--filter"), "{err}");
}

#[test]
fn parse_errors_are_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("A.jl"), "class A { void m( }").unwrap();
    let (code, _, err) = run(&["extract", p(dir.path())]);
    assert_eq!(code, 2);
    assert!(err.contains("A.jl:1:19: expected"), "{err}");
}

#[test]
fn out_and_dot_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let src = corpus_root().join("imagemgr");
    let cc = src.join("hideScope.cc");
    let report = dir.path().join("r.txt");
    let dot = dir.path().join("g.dot");
    let (code, out, _) = run(&["check", p(&src), "--constraints", p(&cc), "--out", p(&report), "--dot", p(&dot)]);
    assert_eq!(code, 1);
    assert_eq!(out, "");
    assert!(fs::read_to_string(&report).unwrap().contains("VIOLATION"));
    let d = parse_dot(&fs::read_to_string(&dot).unwrap()).unwrap();
    assert_eq!(d.edges_with("color", "red").count(), 6);
}
