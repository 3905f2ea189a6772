use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::token::{is_name, is_numeric, ConstSet, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed statement `{text}`: {reason}")]
    Malformed { text: String, reason: String },
    #[error("illegal name token `{0}`")]
    IllegalName(String),
    #[error("token `{token}` is longer than nstr = {max}")]
    TooLong { token: String, max: usize },
    #[error("numeric literal {0} is not a registered constant")]
    NumericNotAllowed(i64),
    #[error("constant `{0}` used as an output")]
    ConstantAsOutput(String),
    #[error("output `{0}` repeated in one statement")]
    DuplicateOutput(String),
    #[error("`{0}` appears in both the input and the output list")]
    InputIsOutput(String),
}

/// One formal line `name [inputs] [outputs]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Statement {
    pub name: String,
    pub inputs: Vec<Token>,
    pub outputs: Vec<String>,
}

fn write_list<'a>(f: &mut fmt::Formatter<'_>, items: impl Iterator<Item = String>) -> fmt::Result {
    let items: Vec<String> = items.collect();
    if items.is_empty() {
        f.write_str("[ ]")
    } else {
        write!(f, "[{}]", items.join(" "))
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.name)?;
        write_list(f, self.inputs.iter().map(Token::to_string))?;
        f.write_str(" ")?;
        write_list(f, self.outputs.iter().cloned())
    }
}

/// Splits on whitespace and isolates brackets.
pub(crate) fn lex(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '[' | ']' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(c.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

impl Statement {
    pub fn new(name: &str, inputs: Vec<Token>, outputs: Vec<&str>) -> Statement {
        Statement {
            name: name.to_string(),
            inputs,
            outputs: outputs.into_iter().map(str::to_string).collect(),
        }
    }

    /// Parse with the default constants (`-1`, `0`, `1`) and no length bound.
    pub fn parse(text: &str) -> Result<Statement, ParseError> {
        Self::parse_with(text, &ConstSet::default(), usize::MAX)
    }

    pub fn parse_with(text: &str, consts: &ConstSet, nstr: usize) -> Result<Statement, ParseError> {
        let toks = lex(text);
        let (stmt, used) = Self::parse_tokens(&toks, consts, nstr, text)?;
        if used != toks.len() {
            return Err(malformed(text, "trailing tokens after the output list"));
        }
        Ok(stmt)
    }

    /// Parse one statement from the front of a lexed token stream, returning
    /// the statement and the number of tokens consumed.
    pub(crate) fn parse_tokens(
        toks: &[String],
        consts: &ConstSet,
        nstr: usize,
        text: &str,
    ) -> Result<(Statement, usize), ParseError> {
        let name = toks.first().ok_or_else(|| malformed(text, "empty statement"))?;
        check_name(name, nstr)?;
        let (inputs, after_in) = bracket_list(toks, 1, text)?;
        let (outputs, after_out) = bracket_list(toks, after_in, text)?;
        let mut ins = Vec::with_capacity(inputs.len());
        for t in inputs {
            ins.push(classify(t, consts, nstr)?);
        }
        let mut outs: Vec<String> = Vec::with_capacity(outputs.len());
        for t in outputs {
            if is_numeric(t) {
                return Err(ParseError::ConstantAsOutput(t.clone()));
            }
            check_name(t, nstr)?;
            if consts.is_named(t) {
                return Err(ParseError::ConstantAsOutput(t.clone()));
            }
            if outs.contains(t) {
                return Err(ParseError::DuplicateOutput(t.clone()));
            }
            outs.push(t.clone());
        }
        for t in &ins {
            if let Token::Var(v) = t {
                if outs.contains(v) {
                    return Err(ParseError::InputIsOutput(v.clone()));
                }
            }
        }
        Ok((Statement { name: name.clone(), inputs: ins, outputs: outs }, after_out))
    }

    /// All I/O names in order (inputs then outputs), constants included.
    pub fn io_texts(&self) -> Vec<String> {
        self.inputs.iter().map(Token::text).chain(self.outputs.iter().cloned()).collect()
    }

    /// Input variables (constants skipped).
    pub fn input_vars(&self) -> impl Iterator<Item = &str> {
        self.inputs.iter().filter_map(Token::as_var)
    }

    /// True when `other` has the same name and inputs, and the same number of outputs.
    pub fn same_up_to_outputs(&self, other: &Statement) -> bool {
        self.name == other.name && self.inputs == other.inputs && self.outputs.len() == other.outputs.len()
    }
}

fn malformed(text: &str, reason: &str) -> ParseError {
    ParseError::Malformed { text: text.to_string(), reason: reason.to_string() }
}

fn check_name(t: &str, nstr: usize) -> Result<(), ParseError> {
    if !is_name(t) {
        return Err(ParseError::IllegalName(t.to_string()));
    }
    if t.len() > nstr {
        return Err(ParseError::TooLong { token: t.to_string(), max: nstr });
    }
    Ok(())
}

fn classify(t: &str, consts: &ConstSet, nstr: usize) -> Result<Token, ParseError> {
    if is_numeric(t) {
        let n: i64 = t.parse().map_err(|_| ParseError::IllegalName(t.to_string()))?;
        if !consts.allows_numeric(n) {
            return Err(ParseError::NumericNotAllowed(n));
        }
        return Ok(Token::Num(n));
    }
    check_name(t, nstr)?;
    if consts.is_named(t) {
        Ok(Token::Const(t.to_string()))
    } else {
        Ok(Token::Var(t.to_string()))
    }
}

fn bracket_list<'a>(toks: &'a [String], at: usize, text: &str) -> Result<(&'a [String], usize), ParseError> {
    if toks.get(at).map(String::as_str) != Some("[") {
        return Err(malformed(text, "expected `[`"));
    }
    let mut j = at + 1;
    while j < toks.len() && toks[j] != "]" {
        if toks[j] == "[" {
            return Err(malformed(text, "nested `[`"));
        }
        j += 1;
    }
    if j >= toks.len() {
        return Err(malformed(text, "unclosed `[`"));
    }
    Ok((&toks[at + 1..j], j + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_paper_forms() {
        let s = Statement::parse("add [a b] [c]").unwrap();
        assert_eq!(s.name, "add");
        assert_eq!(s.inputs, vec![Token::var("a"), Token::var("b")]);
        assert_eq!(s.outputs, vec!["c".to_string()]);
        let t = Statement::parse("typei [a] [ ]").unwrap();
        assert!(t.outputs.is_empty());
        assert_eq!(t.to_string(), "typei [a] [ ]");
        let m = Statement::parse("mult [-1 b] [d]").unwrap();
        assert_eq!(m.inputs[0], Token::Num(-1));
    }

    #[test]
    fn rejects_bad_forms() {
        assert!(Statement::parse("add [a b c]").is_err());
        assert!(Statement::parse("add [a 7] [c]").is_err());
        assert!(Statement::parse("add [a b] [c c]").is_err());
        assert!(Statement::parse("add [a b] [a]").is_err());
        assert!(Statement::parse("add [a b] [0]").is_err());
        assert!(Statement::parse("Add [a b] [c]").is_err());
        assert!(Statement::parse_with("add [abcdef] [c]", &ConstSet::default(), 4).is_err());
    }

    #[test]
    fn named_constants_are_classified() {
        let mut c = ConstSet::default();
        c.insert_named("eset");
        let s = Statement::parse_with("eqset [a eset] [p]", &c, 16).unwrap();
        assert_eq!(s.inputs[1], Token::Const("eset".into()));
        assert!(Statement::parse_with("gen [a] [eset]", &c, 16).is_err());
    }
}
