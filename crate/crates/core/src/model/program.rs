use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::lists::unique;
use super::statement::{ParseError, Statement};
use super::token::{ConstSet, Token};

/// An ordered statement list. Validity is checked separately so that
/// partially built derivations can be represented and diagnosed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Program {
    pub stmts: Vec<Statement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum StructuralError {
    #[error("output `{var}` assigned on lines {first} and {second}")]
    DuplicateOutput { var: String, first: usize, second: usize },
    #[error("input `{var}` on line {line} is bound by the output of line {binder}")]
    ForwardBinding { var: String, line: usize, binder: usize },
    #[error("constant `{var}` used as an output on line {line}")]
    ConstantAsOutput { var: String, line: usize },
    #[error("unknown atom `{name}` on line {line}")]
    UnknownAtom { name: String, line: usize },
    #[error("program length {len} exceeds nlst = {max}")]
    TooLong { len: usize, max: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProgramWarning {
    /// An identical statement with empty outputs appears more than once.
    RepeatedCheck { stmt: String, first: usize, second: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConcatError {
    #[error("outputs of the appended program clash with names of the prefix: {0:?}")]
    NameClash(Vec<String>),
    #[error("concatenation is not a program: {0:?}")]
    Invalid(Vec<StructuralError>),
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.stmts.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl From<Vec<Statement>> for Program {
    fn from(stmts: Vec<Statement>) -> Self {
        Program { stmts }
    }
}

impl Program {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.stmts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stmts.is_empty()
    }

    /// Parse one statement per non-empty line.
    pub fn parse_lines(text: &str, consts: &ConstSet, nstr: usize) -> Result<Program, ParseError> {
        let stmts = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| Statement::parse_with(l, consts, nstr))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Program { stmts })
    }

    /// Every I/O name in order of first appearance, constants included.
    pub fn io_names(&self) -> Vec<String> {
        unique(&self.stmts.iter().flat_map(Statement::io_texts).collect::<Vec<_>>())
    }

    /// All output names.
    pub fn outputs(&self) -> Vec<String> {
        self.stmts.iter().flat_map(|s| s.outputs.iter().cloned()).collect()
    }

    /// Checks the I/O dependency condition and constant use. Line numbers are 1-based.
    pub fn validate_structure(&self, consts: &ConstSet) -> Result<Vec<ProgramWarning>, Vec<StructuralError>> {
        let mut errors = Vec::new();
        let mut warnings = Vec::new();
        let mut binder: HashMap<&str, usize> = HashMap::new();
        for (k, s) in self.stmts.iter().enumerate() {
            for o in &s.outputs {
                if consts.is_const_text(o) {
                    errors.push(StructuralError::ConstantAsOutput { var: o.clone(), line: k + 1 });
                }
                if let Some(&first) = binder.get(o.as_str()) {
                    errors.push(StructuralError::DuplicateOutput { var: o.clone(), first, second: k + 1 });
                } else {
                    binder.insert(o, k + 1);
                }
            }
        }
        for (k, s) in self.stmts.iter().enumerate() {
            for v in s.input_vars() {
                if let Some(&l) = binder.get(v) {
                    if l >= k + 1 {
                        errors.push(StructuralError::ForwardBinding { var: v.to_string(), line: k + 1, binder: l });
                    }
                }
            }
        }
        for (k, s) in self.stmts.iter().enumerate() {
            if !s.outputs.is_empty() {
                continue;
            }
            if let Some(j) = self.stmts[..k].iter().position(|t| t == s) {
                warnings.push(ProgramWarning::RepeatedCheck { stmt: s.to_string(), first: j + 1, second: k + 1 });
            }
        }
        if errors.is_empty() {
            Ok(warnings)
        } else {
            Err(errors)
        }
    }

    /// Primary input variables: inputs not bound to outputs, first occurrence order.
    pub fn piv(&self) -> Vec<Token> {
        let outs = self.outputs();
        let ins: Vec<Token> = self
            .stmts
            .iter()
            .flat_map(|s| s.inputs.iter())
            .filter(|t| match t {
                Token::Var(v) => !outs.contains(v),
                _ => true,
            })
            .cloned()
            .collect();
        unique(&ins)
    }

    /// Free variables: the non-constant primary inputs.
    pub fn free(&self) -> Vec<String> {
        self.piv().into_iter().filter_map(|t| t.as_var().map(str::to_string)).collect()
    }

    /// `[p q]`, refusing when an output of `q` names anything in `p`.
    pub fn concat(&self, q: &Program, consts: &ConstSet) -> Result<Program, ConcatError> {
        let names = self.io_names();
        let clash: Vec<String> = unique(&q.outputs().into_iter().filter(|o| names.contains(o)).collect::<Vec<_>>());
        if !clash.is_empty() {
            return Err(ConcatError::NameClash(clash));
        }
        let mut stmts = self.stmts.clone();
        stmts.extend(q.stmts.iter().cloned());
        let out = Program { stmts };
        out.validate_structure(consts).map_err(ConcatError::Invalid)?;
        Ok(out)
    }
}
