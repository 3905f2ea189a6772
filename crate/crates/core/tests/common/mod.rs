use std::path::{Path, PathBuf};

use pecr::kernel::ProofScript;
use pecr::Theory;

pub struct CorpusFile {
    pub path: PathBuf,
    pub text: String,
    pub script: ProofScript,
}

pub fn corpus(th: &Theory, name: &str) -> Vec<CorpusFile> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name);
    let mut files: Vec<PathBuf> = std::fs::read_dir(&root).unwrap().map(|e| e.unwrap().path()).collect();
    files.retain(|p| p.extension().is_some_and(|e| e == "prf"));
    files.sort();
    files
        .into_iter()
        .map(|path| {
            let text = std::fs::read_to_string(&path).unwrap();
            let script = ProofScript::parse(&text, th).unwrap_or_else(|e| panic!("{path:?}: {e}"));
            CorpusFile { path, text, script }
        })
        .collect()
}

