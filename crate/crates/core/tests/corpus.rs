use std::path::Path;

use pecr::kernel::{check_batch, ProofScript};
use pecr::Theory;

fn load_scripts(theory: &Theory, dir: &str) -> Vec<ProofScript> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(dir);
    let mut files: Vec<_> = std::fs::read_dir(&root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "prf"))
        .collect();
    files.sort();
    files
        .iter()
        .map(|f| ProofScript::parse(&std::fs::read_to_string(f).unwrap(), theory).unwrap_or_else(|e| panic!("{f:?}: {e}")))
        .collect()
}

fn check_theory(name: &str) {
    let mut th = Theory::bundled_axioms(name).unwrap();
    let scripts = load_scripts(&th, name);
    let items = check_batch(&mut th, &scripts).unwrap();
    let mut failures = Vec::new();
    for it in &items {
        match &it.result {
            Ok(r) if r.is_irredundant() => {}
            Ok(r) => failures.push(format!("{}: redundant {:?}", it.label, r.reduction.redundant)),
            Err(e) => failures.push(e.to_string()),
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn int_corpus() {
    check_theory("int");
}

#[test]
fn vec_corpus() {
    check_theory("vec");
}

#[test]
fn meta_corpus() {
    check_theory("meta");
}

#[test]
fn sets_corpus() {
    check_theory("sets");
}
