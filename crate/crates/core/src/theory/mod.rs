//! Data-driven theories: atomic signatures, constants, disjunctions, the type
//! table and the rule store.

mod bundled;
pub mod format;
mod manifest;

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bundled::{Bundled, BUNDLED_THEORIES};
pub use manifest::Manifest;

use crate::mach::MachParams;
use crate::model::{ConstSet, Program, Statement, StructuralError, Token};
use format::FormatError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomKind {
    Chck,
    Asgn,
    Tasgn,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomSig {
    pub name: String,
    pub kind: AtomKind,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub substitutable: bool,
    pub hook: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeEntry {
    pub ty: String,
    pub check: String,
    pub eq: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constant {
    pub name: String,
    pub ty: String,
    pub value: Option<String>,
}

/// `name [ins] [outs] = a | b`; operands are programs over the formal variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjunctionDef {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub operands: Vec<Program>,
    pub input_types: Vec<String>,
    pub output_types: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Axiom,
    Lemma,
    Theorem,
}

impl RuleKind {
    pub fn header(self) -> &'static str {
        match self {
            RuleKind::Axiom => "Axiom",
            RuleKind::Lemma => "Lemma",
            RuleKind::Theorem => "Theorem",
        }
    }
}

/// The five rule categories, combining the kind with falsity of the conclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleCategory {
    Axiom,
    Lemma,
    Theorem,
    FalsityAxiom,
    FalsityTheorem,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Conclusion {
    Program(Program),
    False,
}

impl Conclusion {
    pub fn is_false(&self) -> bool {
        matches!(self, Conclusion::False)
    }

    pub fn program(&self) -> Option<&Program> {
        match self {
            Conclusion::Program(p) => Some(p),
            Conclusion::False => None,
        }
    }
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conclusion::False => f.write_str(":false"),
            Conclusion::Program(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub label: String,
    pub kind: RuleKind,
    pub premise: Program,
    pub conclusion: Conclusion,
    /// Labels cited in the proof, first use order; empty for axioms.
    pub tcl: Vec<String>,
}

impl RuleRecord {
    pub fn category(&self) -> RuleCategory {
        match (self.kind, self.conclusion.is_false()) {
            (RuleKind::Axiom, false) => RuleCategory::Axiom,
            (RuleKind::Axiom, true) => RuleCategory::FalsityAxiom,
            (_, true) => RuleCategory::FalsityTheorem,
            (RuleKind::Lemma, false) => RuleCategory::Lemma,
            (RuleKind::Theorem, false) => RuleCategory::Theorem,
        }
    }

    pub fn is_axiom(&self) -> bool {
        self.kind == RuleKind::Axiom
    }

    /// `[premise conclusion]` as one program (the conclusion omitted when false).
    pub fn as_program(&self) -> Program {
        let mut p = self.premise.clone();
        if let Conclusion::Program(c) = &self.conclusion {
            p.stmts.extend(c.stmts.iter().cloned());
        }
        p
    }

    pub fn block(&self) -> String {
        format::render_block(self)
    }
}

/// Labels of automated rules; terminal in theorem connection list reduction.
pub const AUTOMATED: [&str; 4] = ["aio", "sr1", "sr2", "disj"];

pub fn is_automated(label: &str) -> bool {
    AUTOMATED.contains(&label)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("unknown theory `{0}`")]
    UnknownTheory(String),
    #[error("{file}: {err}")]
    Format { file: String, err: FormatError },
    #[error("{file} line {line}: {reason}")]
    Manifest { file: String, line: usize, reason: String },
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("rule `{label}` uses unresolved name `{name}`")]
    UnresolvedName { label: String, name: String },
    #[error("rule `{label}`: {reason}")]
    Invariant { label: String, reason: String },
    #[error("extension cycle through `{0}`")]
    ExtendsCycle(String),
    #[error("invalid machine parameters: {0}")]
    Mach(String),
}

/// Where theory files come from.
pub trait TheorySource {
    fn read(&self, theory: &str, file: &str) -> Option<String>;
}

/// Theory files under `<root>/<theory>/<file>`.
#[derive(Debug, Clone)]
pub struct DirSource(pub PathBuf);

impl TheorySource for DirSource {
    fn read(&self, theory: &str, file: &str) -> Option<String> {
        std::fs::read_to_string(self.0.join(theory).join(file)).ok()
    }
}

impl DirSource {
    pub fn new(root: impl AsRef<Path>) -> Self {
        DirSource(root.as_ref().to_path_buf())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    /// Load the theory's own `theorems.dat` (imported theories always load theirs).
    pub own_theorems: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { own_theorems: true }
    }
}

/// Ordered, label-unique collection of axioms, lemmas and theorems.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleStore {
    rules: IndexMap<String, RuleRecord>,
}

impl RuleStore {
    pub fn get(&self, label: &str) -> Option<&RuleRecord> {
        self.rules.get(label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.rules.contains_key(label)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RuleRecord> {
        self.rules.values()
    }

    pub fn labels(&self) -> Vec<String> {
        self.rules.keys().cloned().collect()
    }

    pub fn axioms(&self) -> impl Iterator<Item = &RuleRecord> {
        self.iter().filter(|r| r.is_axiom())
    }

    pub fn theorems(&self) -> impl Iterator<Item = &RuleRecord> {
        self.iter().filter(|r| !r.is_axiom())
    }

    pub fn insert(&mut self, rule: RuleRecord) -> Result<(), TheoryError> {
        if self.rules.contains_key(&rule.label) {
            return Err(TheoryError::DuplicateLabel(rule.label));
        }
        self.rules.insert(rule.label.clone(), rule);
        Ok(())
    }

    pub fn remove(&mut self, label: &str) -> Option<RuleRecord> {
        self.rules.shift_remove(label)
    }

    /// Change a rule's kind, attaching a theorem connection list.
    pub fn relabel(&mut self, label: &str, kind: RuleKind, tcl: Vec<String>) -> Result<(), TheoryError> {
        let r = self.rules.get_mut(label).ok_or_else(|| TheoryError::UnknownLabel(label.to_string()))?;
        r.kind = kind;
        r.tcl = tcl;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Numeric {
    Int,
    Rat,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theory {
    pub name: String,
    pub machine: MachParams,
    pub numeric: Numeric,
    /// Equality atoms carry an output and the substitution rules produce fresh outputs.
    pub abstract_sr: bool,
    pub atoms: IndexMap<String, AtomSig>,
    pub constants: IndexMap<String, Constant>,
    pub consts: ConstSet,
    pub disjunctions: IndexMap<String, DisjunctionDef>,
    pub types: Vec<TypeEntry>,
    pub store: RuleStore,
    /// Theories this one extends, nearest first.
    pub parents: Vec<String>,
}

impl Theory {
    pub fn load(source: &dyn TheorySource, name: &str, opts: LoadOptions) -> Result<Theory, TheoryError> {
        let mut seen = Vec::new();
        Self::load_inner(source, name, opts, &mut seen)
    }

    /// Load one of the theories compiled into the library.
    pub fn bundled(name: &str) -> Result<Theory, TheoryError> {
        Self::load(&Bundled, name, LoadOptions::default())
    }

    /// A bundled theory without its own stored theorems (for re-checking its corpus).
    pub fn bundled_axioms(name: &str) -> Result<Theory, TheoryError> {
        Self::load(&Bundled, name, LoadOptions { own_theorems: false })
    }

    fn load_inner(
        source: &dyn TheorySource,
        name: &str,
        opts: LoadOptions,
        seen: &mut Vec<String>,
    ) -> Result<Theory, TheoryError> {
        if seen.iter().any(|s| s == name) {
            return Err(TheoryError::ExtendsCycle(name.to_string()));
        }
        seen.push(name.to_string());
        let text = source.read(name, "theory.thy").ok_or_else(|| TheoryError::UnknownTheory(name.to_string()))?;
        let manifest = Manifest::parse(&text, &format!("{name}/theory.thy"))?;
        let mut th = match &manifest.extends {
            Some(parent) => {
                let mut p = Self::load_inner(source, parent, LoadOptions { own_theorems: true }, seen)?;
                p.parents.insert(0, parent.clone());
                p
            }
            None => Theory::empty(&manifest.name),
        };
        th.name = manifest.name.clone();
        manifest.apply(&mut th)?;
        if let Some(text) = source.read(name, "disjunctions.dat") {
            th.load_disjunctions(&text, &format!("{name}/disjunctions.dat"))?;
        }
        if let Some(text) = source.read(name, "axioms.dat") {
            th.load_rules(&text, &format!("{name}/axioms.dat"), None)?;
        }
        if opts.own_theorems {
            if let Some(text) = source.read(name, "theorems.dat") {
                let tcl = source.read(name, "tcl.dat").unwrap_or_default();
                th.load_rules(&text, &format!("{name}/theorems.dat"), Some(&tcl))?;
            }
        }
        th.validate()?;
        Ok(th)
    }

    pub fn empty(name: &str) -> Theory {
        Theory {
            name: name.to_string(),
            machine: MachParams::default(),
            numeric: Numeric::None,
            abstract_sr: false,
            atoms: IndexMap::new(),
            constants: IndexMap::new(),
            consts: ConstSet::default(),
            disjunctions: IndexMap::new(),
            types: Vec::new(),
            store: RuleStore::default(),
            parents: Vec::new(),
        }
    }

    /// Parse a rule file and append its rules. `tcl` holds `label [l1 l2 ...]` lines.
    pub fn load_rules(&mut self, text: &str, file: &str, tcl: Option<&str>) -> Result<(), TheoryError> {
        let blocks = format::split_blocks(text).map_err(|err| TheoryError::Format { file: file.into(), err })?;
        let mut tcls: IndexMap<String, Vec<String>> = IndexMap::new();
        for line in tcl.unwrap_or("").lines() {
            let toks = crate::model::lex(line);
            if toks.is_empty() {
                continue;
            }
            let body: Vec<String> = toks[1..].iter().filter(|t| *t != "[" && *t != "]").cloned().collect();
            tcls.insert(toks[0].clone(), body);
        }
        for b in blocks {
            let mut r = b
                .to_record(&self.consts, self.machine.nstr)
                .map_err(|err| TheoryError::Format { file: file.into(), err })?;
            if let Some(t) = tcls.get(&r.label) {
                r.tcl = t.clone();
            }
            self.check_rule(&r)?;
            self.store.insert(r)?;
        }
        Ok(())
    }

    fn load_disjunctions(&mut self, text: &str, file: &str) -> Result<(), TheoryError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let d = manifest::parse_disjunction(line, self)
                .map_err(|reason| TheoryError::Manifest { file: file.into(), line: i + 1, reason })?;
            self.disjunctions.insert(d.name.clone(), d);
        }
        Ok(())
    }

    /// Statement names resolve, premise length, Def. extension condition 2.
    pub fn check_rule(&self, r: &RuleRecord) -> Result<(), TheoryError> {
        let all = r.as_program();
        for s in &all.stmts {
            if !self.resolves(&s.name) {
                return Err(TheoryError::UnresolvedName { label: r.label.clone(), name: s.name.clone() });
            }
        }
        if r.premise.len() > self.machine.nprem {
            return Err(TheoryError::Invariant {
                label: r.label.clone(),
                reason: format!("premise length {} exceeds nprem {}", r.premise.len(), self.machine.nprem),
            });
        }
        if let Err(errs) = all.validate_structure(&self.consts) {
            return Err(TheoryError::Invariant { label: r.label.clone(), reason: format!("{:?}", errs) });
        }
        if let Conclusion::Program(c) = &r.conclusion {
            let names = r.premise.io_names();
            let mut known: Vec<String> = names;
            for s in &c.stmts {
                for t in &s.inputs {
                    if let Token::Var(v) = t {
                        if !known.contains(v) {
                            return Err(TheoryError::Invariant {
                                label: r.label.clone(),
                                reason: format!("conclusion input `{v}` is not a premise I/O name"),
                            });
                        }
                    }
                }
                known.extend(s.outputs.iter().cloned());
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), TheoryError> {
        let mut labels = HashSet::new();
        for r in self.store.iter() {
            labels.insert(r.label.as_str());
        }
        for r in self.store.iter() {
            for t in &r.tcl {
                if !is_automated(t) && !labels.contains(t.as_str()) {
                    return Err(TheoryError::Invariant { label: r.label.clone(), reason: format!("tcl entry `{t}` does not resolve") });
                }
            }
        }
        self.machine.validate().map_err(|e| TheoryError::Mach(e.to_string()))
    }

    pub fn resolves(&self, name: &str) -> bool {
        self.atoms.contains_key(name) || self.disjunctions.contains_key(name)
    }

    pub fn is_disjunction(&self, name: &str) -> bool {
        self.disjunctions.contains_key(name)
    }

    pub fn input_types(&self, name: &str) -> Option<&[String]> {
        if let Some(a) = self.atoms.get(name) {
            return Some(&a.inputs);
        }
        self.disjunctions.get(name).map(|d| d.input_types.as_slice())
    }

    pub fn output_types(&self, name: &str) -> Option<&[String]> {
        if let Some(a) = self.atoms.get(name) {
            return Some(&a.outputs);
        }
        self.disjunctions.get(name).map(|d| d.output_types.as_slice())
    }

    /// Type of the I/O element at `pos` (inputs first, then outputs).
    pub fn io_type(&self, s: &Statement, pos: usize) -> Option<&str> {
        let n = s.inputs.len();
        if pos < n {
            self.input_types(&s.name)?.get(pos).map(String::as_str)
        } else {
            self.output_types(&s.name)?.get(pos - n).map(String::as_str)
        }
    }

    pub fn type_entry(&self, ty: &str) -> Option<&TypeEntry> {
        self.types.iter().find(|t| t.ty == ty)
    }

    /// The type whose equality atom is `eq`.
    pub fn type_of_eq_atom(&self, eq: &str) -> Option<&TypeEntry> {
        self.types.iter().find(|t| t.eq.as_deref() == Some(eq))
    }

    pub fn is_substitutable(&self, name: &str) -> bool {
        if let Some(a) = self.atoms.get(name) {
            return a.substitutable;
        }
        if let Some(d) = self.disjunctions.get(name) {
            return d.operands.iter().all(|op| op.stmts.iter().all(|s| self.is_substitutable(&s.name)));
        }
        false
    }

    /// Falsity rules in the store.
    pub fn falsity_rules(&self) -> impl Iterator<Item = &RuleRecord> {
        self.store.iter().filter(|r| r.conclusion.is_false())
    }

    /// Parse a statement with this theory's constants and bounds.
    pub fn parse_statement(&self, text: &str) -> Result<Statement, crate::model::ParseError> {
        Statement::parse_with(text, &self.consts, self.machine.nstr)
    }

    pub fn parse_program(&self, text: &str) -> Result<Program, crate::model::ParseError> {
        Program::parse_lines(text, &self.consts, self.machine.nstr)
    }

    /// Checks the program-list invariants (a)-(c) against this theory.
    pub fn validate_program(&self, p: &Program) -> Result<Vec<crate::model::ProgramWarning>, Vec<StructuralError>> {
        let mut errs = Vec::new();
        for (i, s) in p.stmts.iter().enumerate() {
            if !self.resolves(&s.name) {
                errs.push(StructuralError::UnknownAtom { name: s.name.clone(), line: i + 1 });
            }
        }
        if p.len() > self.machine.nlst {
            errs.push(StructuralError::TooLong { len: p.len(), max: self.machine.nlst });
        }
        match p.validate_structure(&self.consts) {
            Ok(w) if errs.is_empty() => Ok(w),
            Ok(_) => Err(errs),
            Err(mut e) => {
                errs.append(&mut e);
                Err(errs)
            }
        }
    }

    /// Append a verified rule.
    pub fn store_rule(&mut self, r: RuleRecord) -> Result<(), TheoryError> {
        self.check_rule(&r)?;
        self.store.insert(r)
    }

    pub fn rule(&self, label: &str) -> Option<&RuleRecord> {
        self.store.get(label)
    }

    /// Serialise all non-axiom rules as a `theorems.dat` image plus its `tcl.dat`.
    pub fn theorem_files(&self) -> (String, String) {
        let blocks: Vec<String> = self.store.theorems().map(RuleRecord::block).collect();
        let tcl: Vec<String> =
            self.store.theorems().map(|r| format!("{} [{}]", r.label, r.tcl.join(" "))).collect();
        (blocks.join("\n"), tcl.join("\n") + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_theories_load() {
        let counts = [("int", 34), ("rat", 36), ("vec", 90), ("meta", 33), ("sets", 41)];
        for (name, n) in counts {
            let th = Theory::bundled_axioms(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(th.store.axioms().count(), n, "{name}");
        }
    }

    #[test]
    fn disjunction_types_are_inferred() {
        let th = Theory::bundled_axioms("int").unwrap();
        let abs = &th.disjunctions["abs"];
        assert_eq!(abs.input_types, vec!["int"]);
        assert_eq!(abs.output_types, vec!["int"]);
        assert!(th.is_substitutable("trich"));
        assert!(!th.is_substitutable("typei"));
    }

    #[test]
    fn vec_inherits_int() {
        let th = Theory::bundled_axioms("vec").unwrap();
        assert!(th.rule("axi2a").is_some());
        assert_eq!(th.parents, vec!["int".to_string()]);
        assert!(th.consts.allows_numeric(-1));
        assert_eq!(th.type_of_eq_atom("eqv").unwrap().ty, "vec");
    }

    #[test]
    fn relabel_and_remove() {
        let mut th = Theory::bundled_axioms("int").unwrap();
        th.store.relabel("axi2a", RuleKind::Theorem, vec!["axi1".into()]).unwrap();
        assert_eq!(th.rule("axi2a").unwrap().category(), RuleCategory::Theorem);
        assert!(th.store.remove("axi2a").is_some());
        assert!(th.store.relabel("axi2a", RuleKind::Axiom, vec![]).is_err());
    }
}
