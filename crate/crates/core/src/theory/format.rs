//! Text formats of rule files: `Axiom|Theorem|Lemma <label>.` blocks with a
//! dashed separator, optionally followed by a `Proof.` section.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Conclusion, RuleKind, RuleRecord};
use crate::model::{ConstSet, ParseError, Program, Statement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    Layout { line: usize, reason: String },
    #[error("line {line}: {err}")]
    Statement { line: usize, err: ParseError },
}

/// A rule block before statement parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawBlock {
    pub kind: RuleKind,
    pub label: String,
    /// 1-based line of the header.
    pub line: usize,
    pub premise: Vec<(usize, String)>,
    pub conclusion: Vec<(usize, String)>,
    /// Raw lines after `Proof.`, blank lines dropped.
    pub proof: Vec<(usize, String)>,
}

pub fn parse_header(line: &str) -> Option<(RuleKind, String)> {
    let line = line.trim();
    let (word, rest) = line.split_once(' ')?;
    let kind = match word {
        "Axiom" => RuleKind::Axiom,
        "Theorem" => RuleKind::Theorem,
        "Lemma" => RuleKind::Lemma,
        _ => return None,
    };
    let label = rest.strip_suffix('.')?;
    if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric()) {
        return None;
    }
    Some((kind, label.to_string()))
}

pub fn is_separator(line: &str) -> bool {
    let t = line.trim();
    t.len() >= 3 && t.chars().all(|c| c == '-')
}

#[derive(PartialEq)]
enum State {
    Between,
    Premise,
    Conclusion,
    Proof,
}

pub fn split_blocks(text: &str) -> Result<Vec<RawBlock>, FormatError> {
    let mut blocks: Vec<RawBlock> = Vec::new();
    let mut state = State::Between;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim_end();
        if let Some((kind, label)) = parse_header(t) {
            if state == State::Premise {
                return Err(FormatError::Layout { line, reason: "previous block has no separator".into() });
            }
            blocks.push(RawBlock { kind, label, line, premise: vec![], conclusion: vec![], proof: vec![] });
            state = State::Premise;
            continue;
        }
        if t.trim().starts_with('#') && state == State::Between {
            continue;
        }
        let blank = t.trim().is_empty();
        match state {
            State::Between => {
                if t.trim() == "Proof." && blocks.last().is_some_and(|b| b.proof.is_empty()) {
                    state = State::Proof;
                } else if !blank {
                    return Err(FormatError::Layout { line, reason: format!("unexpected text `{t}`") });
                }
            }
            State::Premise => {
                let b = blocks.last_mut().unwrap();
                if is_separator(t) {
                    state = State::Conclusion;
                } else if !blank {
                    b.premise.push((line, t.trim().to_string()));
                }
            }
            State::Conclusion => {
                let b = blocks.last_mut().unwrap();
                if t.trim() == "Proof." {
                    state = State::Proof;
                } else if blank {
                    if !b.conclusion.is_empty() {
                        state = State::Between;
                    }
                } else {
                    b.conclusion.push((line, t.trim().to_string()));
                }
            }
            State::Proof => {
                if !blank {
                    blocks.last_mut().unwrap().proof.push((line, t.to_string()));
                }
            }
        }
    }
    if state == State::Premise {
        return Err(FormatError::Layout { line: text.lines().count(), reason: "block has no separator".into() });
    }
    for b in &blocks {
        if b.conclusion.is_empty() {
            return Err(FormatError::Layout { line: b.line, reason: format!("{} has no conclusion", b.label) });
        }
    }
    Ok(blocks)
}

pub(crate) fn parse_stmt_at(line: usize, text: &str, consts: &ConstSet, nstr: usize) -> Result<Statement, FormatError> {
    Statement::parse_with(text, consts, nstr).map_err(|err| FormatError::Statement { line, err })
}

impl RawBlock {
    /// Parse the statements of the stated block into a rule record (empty tcl).
    pub fn to_record(&self, consts: &ConstSet, nstr: usize) -> Result<RuleRecord, FormatError> {
        let premise = self
            .premise
            .iter()
            .map(|(l, s)| parse_stmt_at(*l, s, consts, nstr))
            .collect::<Result<Vec<_>, _>>()?;
        let conclusion = if self.conclusion.len() == 1 && self.conclusion[0].1 == ":false" {
            Conclusion::False
        } else {
            Conclusion::Program(Program {
                stmts: self
                    .conclusion
                    .iter()
                    .map(|(l, s)| parse_stmt_at(*l, s, consts, nstr))
                    .collect::<Result<Vec<_>, _>>()?,
            })
        };
        Ok(RuleRecord {
            label: self.label.clone(),
            kind: self.kind,
            premise: Program { stmts: premise },
            conclusion,
            tcl: vec![],
        })
    }
}

/// Renders the stated block: header, blank line, premises, separator, conclusion.
pub fn render_block(rule: &RuleRecord) -> String {
    let mut lines: Vec<String> = rule.premise.stmts.iter().map(Statement::to_string).collect();
    let concl: Vec<String> = match &rule.conclusion {
        Conclusion::False => vec![":false".to_string()],
        Conclusion::Program(p) => p.stmts.iter().map(Statement::to_string).collect(),
    };
    let width = lines.iter().chain(concl.iter()).map(String::len).max().unwrap_or(3).max(3);
    let mut out = String::new();
    let _ = writeln!(out, "{} {}.", rule.kind.header(), rule.label);
    out.push('\n');
    for l in lines.drain(..) {
        let _ = writeln!(out, "{l}");
    }
    let _ = writeln!(out, "{}", "-".repeat(width));
    for l in concl {
        let _ = writeln!(out, "{l}");
    }
    out
}

/// Whitespace normalisation used when comparing rendered blocks.
pub fn normalize_block(text: &str) -> String {
    text.lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "Axiom axi2a.\n\nadd [a b] [c]\n-------------\nadd [b a] [d]\n\nAxiom ord4.\n\n------------\nlt [0 1] [ ]\n\nAxiom ord5.\n\nlt [a a] [ ]\n------------\n:false\n";

    #[test]
    fn blocks_round_trip() {
        let blocks = split_blocks(SAMPLE).unwrap();
        assert_eq!(blocks.len(), 3);
        let c = ConstSet::default();
        let rendered: Vec<String> = blocks.iter().map(|b| render_block(&b.to_record(&c, 16).unwrap())).collect();
        assert_eq!(rendered.join("\n"), SAMPLE);
        assert!(blocks[1].premise.is_empty());
        assert_eq!(blocks[2].to_record(&c, 16).unwrap().conclusion, Conclusion::False);
    }

    #[test]
    fn headers() {
        assert_eq!(parse_header("Lemma lem3."), Some((RuleKind::Lemma, "lem3".into())));
        assert_eq!(parse_header("Lemma lem3"), None);
        assert_eq!(parse_header("Proof."), None);
    }

    #[test]
    fn missing_separator_is_an_error() {
        assert!(split_blocks("Axiom x.\n\nadd [a b] [c]\n").is_err());
    }
}
