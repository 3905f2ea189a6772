//! Fixtures shared by the benchmarks.

use std::path::{Path, PathBuf};

use pecr::kernel::ProofScript;
use pecr::Theory;

pub fn corpus_dir(theory: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(theory)
}

/// The corpus scripts of `theory`, sorted by file name.
pub fn corpus(th: &Theory, theory: &str) -> Vec<ProofScript> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir(theory))
        .expect("corpus directory")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "prf"))
        .collect();
    files.sort();
    files
        .iter()
        .flat_map(|f| ProofScript::parse_all(&std::fs::read_to_string(f).expect("readable script"), th).expect("corpus parses"))
        .collect()
}
