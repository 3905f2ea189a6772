//! Theory files compiled into the library.

use super::TheorySource;

/// Names of the bundled theories.
pub const BUNDLED_THEORIES: [&str; 5] = ["int", "rat", "vec", "meta", "sets"];

/// The theories shipped in `theories/`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Bundled;

impl TheorySource for Bundled {
    fn read(&self, theory: &str, file: &str) -> Option<String> {
        let text = match (theory, file) {
            ("int", "theory.thy") => include_str!("../../theories/int/theory.thy"),
            ("int", "axioms.dat") => include_str!("../../theories/int/axioms.dat"),
            ("int", "disjunctions.dat") => include_str!("../../theories/int/disjunctions.dat"),
            ("int", "theorems.dat") => include_str!("../../theories/int/theorems.dat"),
            ("int", "tcl.dat") => include_str!("../../theories/int/tcl.dat"),
            ("rat", "theory.thy") => include_str!("../../theories/rat/theory.thy"),
            ("rat", "axioms.dat") => include_str!("../../theories/rat/axioms.dat"),
            ("rat", "disjunctions.dat") => include_str!("../../theories/rat/disjunctions.dat"),
            ("rat", "theorems.dat") => include_str!("../../theories/rat/theorems.dat"),
            ("rat", "tcl.dat") => include_str!("../../theories/rat/tcl.dat"),
            ("vec", "theory.thy") => include_str!("../../theories/vec/theory.thy"),
            ("vec", "axioms.dat") => include_str!("../../theories/vec/axioms.dat"),
            ("vec", "disjunctions.dat") => include_str!("../../theories/vec/disjunctions.dat"),
            ("vec", "theorems.dat") => include_str!("../../theories/vec/theorems.dat"),
            ("vec", "tcl.dat") => include_str!("../../theories/vec/tcl.dat"),
            ("meta", "theory.thy") => include_str!("../../theories/meta/theory.thy"),
            ("meta", "axioms.dat") => include_str!("../../theories/meta/axioms.dat"),
            ("meta", "disjunctions.dat") => include_str!("../../theories/meta/disjunctions.dat"),
            ("meta", "theorems.dat") => include_str!("../../theories/meta/theorems.dat"),
            ("meta", "tcl.dat") => include_str!("../../theories/meta/tcl.dat"),
            ("sets", "theory.thy") => include_str!("../../theories/sets/theory.thy"),
            ("sets", "axioms.dat") => include_str!("../../theories/sets/axioms.dat"),
            ("sets", "disjunctions.dat") => include_str!("../../theories/sets/disjunctions.dat"),
            ("sets", "theorems.dat") => include_str!("../../theories/sets/theorems.dat"),
            ("sets", "tcl.dat") => include_str!("../../theories/sets/tcl.dat"),
            _ => return None,
        };
        Some(text.to_string())
    }
}
