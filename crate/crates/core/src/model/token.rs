use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// One element of an input list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Token {
    Var(String),
    Num(i64),
    Const(String),
}

impl Token {
    pub fn var(name: &str) -> Token {
        Token::Var(name.to_string())
    }

    pub fn is_const(&self) -> bool {
        !matches!(self, Token::Var(_))
    }

    /// The variable name, if this token is a variable.
    pub fn as_var(&self) -> Option<&str> {
        match self {
            Token::Var(v) => Some(v),
            _ => None,
        }
    }

    /// Textual form used when comparing I/O names.
    pub fn text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Var(v) | Token::Const(v) => f.write_str(v),
            Token::Num(n) => write!(f, "{n}"),
        }
    }
}

/// Names and numeric literals a theory treats as constants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstSet {
    named: BTreeSet<String>,
    numeric: BTreeSet<i64>,
}

impl Default for ConstSet {
    fn default() -> Self {
        ConstSet { named: BTreeSet::new(), numeric: [-1, 0, 1].into_iter().collect() }
    }
}

impl ConstSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// No named constants and no numeric literals.
    pub fn empty() -> Self {
        ConstSet { named: BTreeSet::new(), numeric: BTreeSet::new() }
    }

    pub fn numeric(&self) -> impl Iterator<Item = i64> + '_ {
        self.numeric.iter().copied()
    }

    pub fn insert_named(&mut self, name: &str) {
        self.named.insert(name.to_string());
    }

    pub fn insert_numeric(&mut self, n: i64) {
        self.numeric.insert(n);
    }

    pub fn is_named(&self, name: &str) -> bool {
        self.named.contains(name)
    }

    pub fn allows_numeric(&self, n: i64) -> bool {
        self.numeric.contains(&n)
    }

    pub fn named(&self) -> impl Iterator<Item = &str> {
        self.named.iter().map(String::as_str)
    }

    /// True for any token text that denotes a constant.
    pub fn is_const_text(&self, text: &str) -> bool {
        self.is_named(text) || text.parse::<i64>().is_ok()
    }
}

pub(crate) fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

pub(crate) fn is_numeric(s: &str) -> bool {
    let body = s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s);
    !body.is_empty() && body.chars().all(|c| c.is_ascii_digit())
}
