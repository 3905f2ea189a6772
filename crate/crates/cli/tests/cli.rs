use std::path::{Path, PathBuf};
use std::process::Command;

use pecr::kernel::stated_block;
use pecr::theory::format::normalize_block;

fn corpus(theory: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(theory)
}

fn prf_files(theory: &str) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(corpus(theory))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "prf"))
        .map(|p| p.to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

fn pecr(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["pecr"];
    argv.extend_from_slice(args);
    let code = pecr_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn pecr_owned(args: Vec<String>) -> (i32, String, String) {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    pecr(&refs)
}

#[test]
fn int_corpus_checks_clean() {
    let mut args = vec!["check".to_string()];
    args.extend(prf_files("int"));
    let (code, out, err) = pecr_owned(args);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().last(), Some("66 proofs verified, 0 redundancies"));
    assert_eq!(out.lines().filter(|l| l.contains(": verified")).count(), 66);
}

#[test]
fn every_theory_corpus_checks_clean() {
    for (name, n) in [("vec", 16), ("meta", 19), ("sets", 9)] {
        let mut args = vec!["check".to_string()];
        args.extend(prf_files(name));
        let (code, out, err) = pecr_owned(args);
        assert_eq!(code, 0, "{name}: {err}");
        assert_eq!(out.lines().last().unwrap(), format!("{n} proofs verified, 0 redundancies"));
    }
}

#[test]
fn check_reports_every_line_in_lines_format() {
    let thm1 = corpus("int").join("thm1.prf");
    let (code, out, _) = pecr(&["--format", "lines", "check", thm1.to_str().unwrap()]);
    assert_eq!(code, 0);
    let body = std::fs::read_to_string(&thm1).unwrap();
    let numbered = body.split("Proof.").nth(1).unwrap().lines().filter(|l| !l.trim().is_empty()).count();
    assert_eq!(out.lines().filter(|l| l.starts_with("line thm1 ")).count(), numbered);
    assert!(out.lines().any(|l| l.starts_with("proof thm1 ok")));
    assert_eq!(out.lines().last(), Some("summary 1 0 0"));
}

#[test]
fn eval_overflow_exits_with_evaluation_code() {
    let (code, out, err) = pecr(&["--nint", "100", "eval", "add [a b] [c]", "a = 70, b = 50"]);
    assert_eq!(code, 4);
    assert!(out.is_empty());
    assert!(err.contains("Overflow"), "{err}");
}

#[test]
fn eval_prints_outputs() {
    let (code, out, _) = pecr(&["eval", "add [a b] [c]; mult [c c] [d]", "a = 2, b = 3"]);
    assert_eq!(code, 0);
    assert!(out.contains("c = 5") && out.contains("d = 25"), "{out}");
}

#[test]
fn nint_is_read_from_the_environment() {
    let status = Command::new(env!("CARGO_BIN_EXE_pecr"))
        .args(["eval", "add [a b] [c]", "a = 70, b = 50"])
        .env("PECR_NINT", "100")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(4));
    let ok = Command::new(env!("CARGO_BIN_EXE_pecr")).args(["eval", "add [a b] [c]", "a = 70, b = 50"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout).trim(), "c = 120");
}

#[test]
fn invalid_mach_override_is_a_parse_error() {
    let (code, _, err) = pecr(&["--nint", "0", "eval", "add [a b] [c]", "a = 1, b = 1"]);
    assert_eq!(code, 2);
    assert!(err.contains("nint"), "{err}");
}

#[test]
fn extract_thm47_matches_stated_block() {
    let f = corpus("vec").join("thm47.prf");
    let (code, out, err) = pecr(&["extract", f.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&f).unwrap();
    assert_eq!(normalize_block(&out), normalize_block(stated_block(&text)));
    assert!(out.contains("subbx [p p] [ ]"));
}

#[test]
fn malformed_script_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.prf");
    std::fs::write(&p, "Theorem bad.\n\nadd [a b [c]\n---\nadd [b a] [d]\n\nProof.\n  1 add [a b] [c]\n").unwrap();
    let (code, _, err) = pecr(&["--theory", "int", "check", p.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn altered_proof_is_a_verification_failure() {
    let dir = tempfile::tempdir().unwrap().keep();
    let int = dir.join("int");
    std::fs::create_dir(&int).unwrap();
    let text = std::fs::read_to_string(corpus("int").join("thm2.prf")).unwrap();
    let bad = text.replace(" 16 add [d c] [l]", " 16 add [c d] [l]");
    assert_ne!(bad, text);
    std::fs::write(int.join("thm2.prf"), bad).unwrap();
    let (code, out, _) = pecr(&["check", int.join("thm2.prf").to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(out.contains("thm2 line 16"), "{out}");
    assert!(out.contains("0 proofs verified, 1 failed"), "{out}");
}

#[test]
fn options_of_a_partial_derivation() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("session.txt");
    std::fs::write(&p, "1 add [a b] [c]\n").unwrap();
    let (code, out, _) = pecr(&["--theory", "int", "options", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["add", "[b", "a]", "[d]", "axi2a", "[1]"]), "{out}");
    assert!(out.lines().any(|l| l.starts_with("typei [a] [ ]")));
}

#[test]
fn options_follow_a_split() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("thm17.txt");
    std::fs::write(&p, "1 neq [a 0] [ ] *\n2 mult [a a] [b]\n").unwrap();
    let (code, out, err) = pecr(&["--theory", "int", "options", p.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.lines().any(|l| l.starts_with("lt [0 b] [ ]") && l.contains("disj [lem2 lem1]")), "{out}");
}

#[test]
fn lines_output_is_stable_for_a_seed() {
    let args = ["--format", "lines", "--seed", "7", "--nint", "1000", "sample", "--samples", "200", "--mutants"];
    let first = pecr(&args);
    assert_eq!(first.0, 0, "{}", first.2);
    assert_eq!(first, pecr(&args));
    assert_eq!(first.1.lines().filter(|l| l.contains(" violation ")).count(), 10);
}

#[test]
fn sampling_bundled_axioms_finds_nothing() {
    let (code, out, err) = pecr(&["--nint", "1000", "sample", "axi2a", "axi2b", "ord3", "--samples", "300"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().filter(|l| l.contains("no-violation")).count(), 3);
}

#[test]
fn certify_default_automaton() {
    let (code, out, _) = pecr(&["certify", "--steps", "500", "--state", "01101001"]);
    assert_eq!(code, 0);
    assert!(out.contains("map ca:rule110:m8") && out.contains("checked 500"), "{out}");
    let (code, _, _) = pecr(&["certify", "--cells", "13"]);
    assert_eq!(code, 2);
}

#[test]
fn search_rediscovers_commutativity() {
    let (code, out, err) = pecr(&["--nint", "1000", "search", "--atoms", "add", "--max-premise", "1", "--purge", "axi2a"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("add [a b] [c]\n-------------\nadd [b a] [d]"), "{out}");
    let (code, _, _) = pecr(&["search", "--atoms", "add,mult,lt,eqi,typei,neq", "--max-premise", "1"]);
    assert_eq!(code, 2);
}
