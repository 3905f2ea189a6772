use super::FoundryError;
use crate::theory::{Conclusion, RuleKind, RuleRecord, Theory};

/// A deliberately unsound variant of a bundled axiom.
#[derive(Debug, Clone)]
pub struct Mutant {
    pub base: String,
    pub rule: RuleRecord,
}

/// `(base axiom, mutated conclusion)`: inequality flips and swapped outputs.
pub const MUTATIONS: [(&str, &str); 10] = [
    ("axi2b", "lt [d c] [ ]"),
    ("ord1a", "lt [y x] [ ]"),
    ("ord2a", "lt [y x] [ ]"),
    ("ord2b", "lt [x y] [ ]"),
    ("ord3", "lt [c a] [ ]"),
    ("axi5c", "eqi [b 0] [ ]"),
    ("axi3b", "eqi [y d] [ ]"),
    ("lev1a", "lev [b a] [ ]"),
    ("bx3a", "lev [v a] [ ]"),
    ("axv4c", "eqv [c b] [ ]"),
];

/// Builds the mutants against `th`, which must resolve both int and vec atoms.
pub fn mutants(th: &Theory) -> Result<Vec<Mutant>, FoundryError> {
    MUTATIONS
        .iter()
        .map(|(base, concl)| {
            let orig = th.rule(base).ok_or_else(|| FoundryError::UnknownLabel(base.to_string()))?;
            let c = th.parse_program(concl).map_err(|e| FoundryError::Invalid(e.to_string()))?;
            let rule = RuleRecord {
                label: format!("{base}~mut"),
                kind: RuleKind::Axiom,
                premise: orig.premise.clone(),
                conclusion: Conclusion::Program(c),
                tcl: Vec::new(),
            };
            th.check_rule(&rule).map_err(|e| FoundryError::Invalid(e.to_string()))?;
            Ok(Mutant { base: base.to_string(), rule })
        })
        .collect()
}
