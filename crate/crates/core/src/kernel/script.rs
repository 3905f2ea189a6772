//! Proof scripts: a stated rule block followed by numbered derivation lines.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::Line;
use crate::model::{lex, ParseError, Program, Statement};
use crate::theory::format::{self, FormatError};
use crate::theory::{Conclusion, RuleKind, Theory};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Justification {
    /// `label [n1 n2 ...]`, including the automated `aio`, `sr1` and `sr2`.
    Cite { label: String, refs: Vec<usize> },
    /// `disj [A B]`.
    Disj { left: String, right: String },
}

impl Justification {
    pub fn label(&self) -> &str {
        match self {
            Justification::Cite { label, .. } => label,
            Justification::Disj { .. } => "disj",
        }
    }
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Cite { label, refs } if refs.is_empty() => f.write_str(label),
            Justification::Cite { label, refs } => {
                let r: Vec<String> = refs.iter().map(usize::to_string).collect();
                write!(f, "{label} [{}]", r.join(" "))
            }
            Justification::Disj { left, right } => write!(f, "disj [{left} {right}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptLine {
    pub number: usize,
    /// `None` for a `:false` line.
    pub stmt: Line,
    pub star: bool,
    pub just: Option<Justification>,
}

impl ScriptLine {
    pub fn text(&self) -> String {
        match &self.stmt {
            Some(s) => s.to_string(),
            None => ":false".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofScript {
    pub kind: RuleKind,
    pub label: String,
    pub premise: Program,
    pub conclusion: Conclusion,
    pub lines: Vec<ScriptLine>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("line {line}: {err}")]
    Statement { line: usize, err: ParseError },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("{label}: no proof section")]
    NoProof { label: String },
    #[error("{label}: proof lines are not numbered 1..N (found {found} at position {expected})")]
    Numbering { label: String, expected: usize, found: usize },
}

fn parse_refs(toks: &[String], at: usize, line: usize) -> Result<(Vec<String>, usize), ScriptError> {
    if toks.get(at).map(String::as_str) != Some("[") {
        return Ok((vec![], at));
    }
    let mut out = Vec::new();
    let mut i = at + 1;
    loop {
        match toks.get(i).map(String::as_str) {
            Some("]") => return Ok((out, i + 1)),
            Some(t) => out.push(t.to_string()),
            None => return Err(ScriptError::Malformed { line, reason: "unterminated connection list".into() }),
        }
        i += 1;
    }
}

/// Parse one numbered derivation line.
pub fn parse_line(text: &str, line: usize, th: &Theory) -> Result<ScriptLine, ScriptError> {
    let toks = lex(text);
    let bad = |reason: &str| ScriptError::Malformed { line, reason: reason.to_string() };
    let number: usize = toks.first().and_then(|t| t.parse().ok()).ok_or_else(|| bad("missing line number"))?;
    let (stmt, mut at) = if toks.get(1).map(String::as_str) == Some(":false") {
        (None, 2)
    } else {
        let (s, used) = Statement::parse_tokens(&toks[1..], &th.consts, th.machine.nstr, text)
            .map_err(|err| ScriptError::Statement { line, err })?;
        (Some(s), 1 + used)
    };
    let star = toks.get(at).map(String::as_str) == Some("*");
    if star {
        at += 1;
    }
    let just = match toks.get(at) {
        None => None,
        Some(label) => {
            let (items, end) = parse_refs(&toks, at + 1, line)?;
            if end != toks.len() {
                return Err(bad("trailing text after the connection list"));
            }
            if label == "disj" {
                match items.as_slice() {
                    [a, b] => Some(Justification::Disj { left: a.clone(), right: b.clone() }),
                    _ => return Err(bad("disj cites exactly two rules")),
                }
            } else {
                let refs = items
                    .iter()
                    .map(|r| r.parse::<usize>().map_err(|_| bad(&format!("`{r}` is not a line label"))))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(Justification::Cite { label: label.clone(), refs })
            }
        }
    };
    Ok(ScriptLine { number, stmt, star, just })
}

/// The stated rule block of a proof file: everything before the `Proof.` line.
pub fn stated_block(text: &str) -> &str {
    let mut at = 0;
    for line in text.split_inclusive('\n') {
        if line.trim() == "Proof." {
            return &text[..at];
        }
        at += line.len();
    }
    text
}

impl ProofScript {
    /// Parse every block in `text`; each must carry a proof.
    pub fn parse_all(text: &str, th: &Theory) -> Result<Vec<ProofScript>, ScriptError> {
        let blocks = format::split_blocks(text)?;
        let mut out = Vec::new();
        for b in blocks {
            let rec = b.to_record(&th.consts, th.machine.nstr)?;
            if b.proof.is_empty() {
                return Err(ScriptError::NoProof { label: b.label });
            }
            let mut lines = Vec::new();
            for (k, (ln, t)) in b.proof.iter().enumerate() {
                let l = parse_line(t, *ln, th)?;
                if l.number != k + 1 {
                    return Err(ScriptError::Numbering { label: b.label.clone(), expected: k + 1, found: l.number });
                }
                lines.push(l);
            }
            out.push(ProofScript { kind: rec.kind, label: rec.label, premise: rec.premise, conclusion: rec.conclusion, lines });
        }
        Ok(out)
    }

    pub fn parse(text: &str, th: &Theory) -> Result<ProofScript, ScriptError> {
        let mut all = Self::parse_all(text, th)?;
        match all.len() {
            1 => Ok(all.remove(0)),
            n => Err(ScriptError::Malformed { line: 1, reason: format!("expected one proof, found {n}") }),
        }
    }

    /// Labels cited by the derivation lines, first use order.
    pub fn cited_labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut push = |s: &str| {
            if !out.iter().any(|o| o == s) {
                out.push(s.to_string());
            }
        };
        for l in &self.lines {
            match &l.just {
                Some(Justification::Cite { label, .. }) => push(label),
                Some(Justification::Disj { left, right }) => {
                    push("disj");
                    push(left);
                    push(right);
                }
                None => {}
            }
        }
        out
    }

    pub fn line_stmts(&self) -> Vec<Line> {
        self.lines.iter().map(|l| l.stmt.clone()).collect()
    }

    /// Renders the script in the listing layout (statement column padded to 24).
    pub fn render(&self) -> String {
        let rec = crate::theory::RuleRecord {
            label: self.label.clone(),
            kind: self.kind,
            premise: self.premise.clone(),
            conclusion: self.conclusion.clone(),
            tcl: vec![],
        };
        let mut out = format::render_block(&rec);
        out.push_str("\nProof.\n");
        for l in &self.lines {
            let mut body = l.text();
            if l.star {
                body.push_str(" *");
            }
            match &l.just {
                Some(j) => out.push_str(&format!("{:>3} {:<24} {}\n", l.number, body, j)),
                None => out.push_str(&format!("{:>3} {}\n", l.number, body)),
            }
        }
        out
    }
}
