//! Interactive derivations: a premise, a growing list of derived lines and
//! the split/contract workflow.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{check_contraction, options, split_line, used_names, Derived, Deriver, FreshNames, Line, Pick, Step};
use crate::kernel::{check_proof, extract, ExtractError, Justification, ProofScript, ScriptLine};
use crate::model::{Program, StructuralError};
use crate::theory::{Conclusion, RuleKind, RuleRecord, Theory};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("the step is not an option of the current derivation")]
    NotAnOption,
    #[error("option `{0}` was computed for an earlier version of the derivation")]
    StaleOption(String),
    #[error("line {0} does not exist")]
    NoSuchLine(usize),
    #[error("line {0} is not a disjunction")]
    NotADisjunction(usize),
    #[error("the derivation has already reached `:false`")]
    Closed,
    #[error("invalid premise: {0:?}")]
    InvalidPremise(Vec<StructuralError>),
    #[error(transparent)]
    Extract(#[from] ExtractError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionLine {
    pub stmt: Line,
    pub star: bool,
    pub step: Option<Step>,
}

/// A derivation in progress.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub theory: String,
    pub premise: Program,
    pub lines: Vec<SessionLine>,
    /// Incremented on every change.
    pub version: u64,
}

impl Session {
    pub fn new(th: &Theory, premise: Program) -> Result<Session, ApplyError> {
        th.validate_program(&premise).map_err(ApplyError::InvalidPremise)?;
        let lines = premise.stmts.iter().map(|s| SessionLine { stmt: Some(s.clone()), star: false, step: None }).collect();
        Ok(Session { theory: th.name.clone(), premise, lines, version: 0 })
    }

    pub fn line_stmts(&self) -> Vec<Line> {
        self.lines.iter().map(|l| l.stmt.clone()).collect()
    }

    /// 0-based indices of starred lines.
    pub fn starred(&self) -> Vec<usize> {
        self.lines.iter().enumerate().filter(|(_, l)| l.star).map(|(k, _)| k).collect()
    }

    fn closed(&self) -> bool {
        self.lines.last().is_some_and(|l| l.stmt.is_none())
    }

    pub fn options(&self, th: &Theory) -> Vec<Step> {
        if self.closed() {
            return vec![];
        }
        options(th, &self.line_stmts(), &self.starred())
    }

    /// Content hash identifying `step` at the current version.
    pub fn option_id(&self, step: &Step) -> String {
        let mut h = Sha256::new();
        h.update(self.version.to_le_bytes());
        h.update(serde_json::to_vec(&self.lines).unwrap_or_default());
        h.update(serde_json::to_vec(step).unwrap_or_default());
        hex::encode(&h.finalize()[..12])
    }

    /// Applies the option with the given id, recomputing the options to validate it.
    pub fn apply_by_id(&mut self, th: &Theory, id: &str) -> Result<Step, ApplyError> {
        let step = self
            .options(th)
            .into_iter()
            .find(|s| self.option_id(s) == id)
            .ok_or_else(|| ApplyError::StaleOption(id.to_string()))?;
        self.push(step.clone());
        Ok(step)
    }

    /// Applies a step after re-deriving it.
    pub fn apply(&mut self, th: &Theory, step: &Step) -> Result<(), ApplyError> {
        if self.closed() {
            return Err(ApplyError::Closed);
        }
        let lines = self.line_stmts();
        let mut step = step.clone();
        if let Derived::Stmt(s) = &mut step.result {
            let used = used_names(th, &lines);
            if s.outputs.iter().any(|o| used.contains(o)) {
                let mut fresh = FreshNames::new(used);
                for o in s.outputs.iter_mut() {
                    *o = fresh.next_name();
                }
            }
        }
        let ok = match &step.branches {
            Some((a, b)) => match check_contraction(th, &lines, &self.starred(), a, b, &step.result) {
                Some(c) => {
                    let refs: Vec<usize> = c.refs.iter().map(|r| r + 1).collect();
                    if step.refs.is_empty() {
                        step.refs = refs;
                        true
                    } else {
                        refs == step.refs
                    }
                }
                None => false,
            },
            None => {
                if step.refs.iter().any(|&r| r == 0 || r > lines.len()) {
                    return Err(ApplyError::NotAnOption);
                }
                let idx: Vec<usize> = step.refs.iter().map(|r| r - 1).collect();
                Deriver::new(th, &lines).derives(&step.label, Pick::Fixed(&idx), &step.result).is_some()
            }
        };
        if !ok {
            return Err(ApplyError::NotAnOption);
        }
        self.push(step);
        Ok(())
    }

    fn push(&mut self, step: Step) {
        self.lines.push(SessionLine { stmt: step.result.as_line(), star: false, step: Some(step) });
        self.version += 1;
    }

    /// Rebuilds a derivation from numbered lines: the leading unjustified
    /// lines are the premise, every later line is applied as a step and a
    /// starred line is split once it is in place.
    pub fn from_script_lines(th: &Theory, lines: &[ScriptLine]) -> Result<Session, ApplyError> {
        let n = lines.iter().take_while(|l| l.just.is_none()).count();
        let mut premise = Program::new();
        for l in &lines[..n] {
            premise.stmts.push(l.stmt.clone().ok_or(ApplyError::NotAnOption)?);
        }
        let mut session = Session::new(th, premise)?;
        for (k, l) in lines.iter().enumerate() {
            if k >= n {
                let just = l.just.as_ref().ok_or(ApplyError::NotAnOption)?;
                session.apply(th, &Step::from_line(l.stmt.clone(), just))?;
            }
            if l.star {
                session.split(th, k + 1)?;
            }
        }
        Ok(session)
    }

    /// Marks a disjunction line (1-based) for splitting.
    pub fn split(&mut self, th: &Theory, line: usize) -> Result<(), ApplyError> {
        let l = self.lines.get(line.wrapping_sub(1)).ok_or(ApplyError::NoSuchLine(line))?;
        match &l.stmt {
            Some(s) if th.is_disjunction(&s.name) => {}
            _ => return Err(ApplyError::NotADisjunction(line)),
        }
        self.lines[line - 1].star = true;
        self.version += 1;
        Ok(())
    }

    /// The two operand derivations of a disjunction line (1-based), with the
    /// operand statements spliced in place of the line.
    pub fn operands(&self, th: &Theory, line: usize) -> Result<[Vec<Line>; 2], ApplyError> {
        if line == 0 || line > self.lines.len() {
            return Err(ApplyError::NoSuchLine(line));
        }
        let [a, b] = split_line(th, &self.line_stmts(), line - 1, &[]).ok_or(ApplyError::NotADisjunction(line))?;
        Ok([a.lines, b.lines])
    }

    /// Contraction options with the given branch rules.
    pub fn contractions(&self, th: &Theory, left: &str, right: &str) -> Vec<Step> {
        super::contraction_steps(th, &self.line_stmts(), &self.starred())
            .into_iter()
            .filter(|s| s.branches.as_ref().is_some_and(|(a, b)| a == left && b == right))
            .collect()
    }

    /// The derivation as a proof script of `label`, concluding with the last line.
    pub fn to_script(&self, label: &str, kind: RuleKind) -> ProofScript {
        let lines: Vec<ScriptLine> = self
            .lines
            .iter()
            .enumerate()
            .map(|(k, l)| ScriptLine {
                number: k + 1,
                stmt: l.stmt.clone(),
                star: l.star,
                just: l.step.as_ref().map(|s| match &s.branches {
                    Some((a, b)) => Justification::Disj { left: a.clone(), right: b.clone() },
                    None => Justification::Cite { label: s.label.clone(), refs: s.refs.clone() },
                }),
            })
            .collect();
        let conclusion = match lines.last().and_then(|l| l.stmt.clone()) {
            Some(s) => Conclusion::Program(vec![s].into()),
            None => Conclusion::False,
        };
        ProofScript { kind, label: label.to_string(), premise: self.premise.clone(), conclusion, lines }
    }

    /// Checks the derivation as a proof and extracts the theorem.
    pub fn extract(&self, th: &Theory, label: &str, kind: RuleKind) -> Result<RuleRecord, ApplyError> {
        let script = self.to_script(label, kind);
        let report = check_proof(th, &script).map_err(ExtractError::from)?;
        Ok(extract(&script, &report)?)
    }
}
