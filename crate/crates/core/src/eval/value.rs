use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{lex, ConstSet, Program};

/// A runtime value. Rationals are integers scaled by `10^eps_denom`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Value {
    Int(i64),
    Rat(i64),
    Vec(Vec<i64>),
    Box { lo: Vec<i64>, hi: Vec<i64> },
    Prgm(Program),
    Term(String),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Rat(_) => "rat",
            Value::Vec(_) => "vec",
            Value::Box { .. } => "box",
            Value::Prgm(_) => "prgm",
            Value::Term(_) => "term",
        }
    }

    /// Renders with `scale` used for rationals.
    pub fn render(&self, scale: i64) -> String {
        match self {
            Value::Rat(k) => {
                let digits = scale.to_string().len() - 1;
                let sign = if *k < 0 { "-" } else { "" };
                let a = k.unsigned_abs();
                let s = scale as u64;
                if digits == 0 {
                    format!("{sign}{a}")
                } else {
                    format!("{sign}{}.{:0width$}", a / s, a % s, width = digits)
                }
            }
            other => other.to_string(),
        }
    }
}

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Rat(k) => write!(f, "{k}e-d"),
            Value::Vec(v) => write!(f, "[{}]", join(v)),
            Value::Box { lo, hi } => write!(f, "[[{}] [{}]]", join(lo), join(hi)),
            Value::Prgm(p) => {
                let parts: Vec<String> = p.stmts.iter().map(ToString::to_string).collect();
                write!(f, "{{{}}}", parts.join("; "))
            }
            Value::Term(t) => write!(f, "'{t}'"),
        }
    }
}

/// Variable bindings; insertion order is execution order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Env(pub IndexMap<String, Value>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("environment line {line}: {reason}")]
pub struct EnvError {
    pub line: usize,
    pub reason: String,
}

fn parse_ints(toks: &[String]) -> Option<Vec<i64>> {
    toks.iter().map(|t| t.parse().ok()).collect()
}

/// Parses a decimal into a value scaled by `scale`; `None` if the resolution is exceeded.
pub fn parse_scaled(text: &str, scale: i64) -> Option<i64> {
    let (neg, body) = match text.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, text),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits = scale.to_string().len() - 1;
    if frac.len() > digits || whole.is_empty() || !whole.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let w: i64 = whole.parse().ok()?;
    let f: i64 = if frac.is_empty() { 0 } else { format!("{frac:0<digits$}").parse().ok()? };
    let v = w.checked_mul(scale)?.checked_add(f)?;
    Some(if neg { -v } else { v })
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }

    pub fn insert(&mut self, name: &str, v: Value) {
        self.0.insert(name.to_string(), v);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.0.iter()
    }

    /// Parses `name = value` lines. Values: `5`, `1.25` (when `rat_scale` is set),
    /// `[1 2 3]`, `[[0 0] [4 4]]`, `{stmt; stmt}` and `'term'`.
    pub fn parse(text: &str, rat_scale: Option<i64>, consts: &ConstSet) -> Result<Env, EnvError> {
        let mut env = Env::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: &str| EnvError { line: i + 1, reason: reason.to_string() };
            let (name, value) = line.split_once('=').ok_or_else(|| err("expected `name = value`"))?;
            let name = name.trim();
            if !crate::model::is_name(name) {
                return Err(err(&format!("`{name}` is not a variable name")));
            }
            let v = parse_value(value.trim(), rat_scale, consts).ok_or_else(|| err(&format!("cannot parse `{}`", value.trim())))?;
            if env.contains(name) {
                return Err(err(&format!("`{name}` is bound twice")));
            }
            env.insert(name, v);
        }
        Ok(env)
    }

    pub fn render(&self, scale: i64) -> String {
        self.0.iter().map(|(k, v)| format!("{k} = {}\n", v.render(scale))).collect()
    }
}

pub fn parse_value(text: &str, rat_scale: Option<i64>, consts: &ConstSet) -> Option<Value> {
    if let Some(body) = text.strip_prefix('{').and_then(|b| b.strip_suffix('}')) {
        let lines: Vec<&str> = body.split(';').map(str::trim).filter(|s| !s.is_empty()).collect();
        let p = Program::parse_lines(&lines.join("\n"), consts, usize::MAX).ok()?;
        return Some(Value::Prgm(p));
    }
    if let Some(t) = text.strip_prefix('\'').and_then(|b| b.strip_suffix('\'')) {
        return Some(Value::Term(t.to_string()));
    }
    let toks = lex(text);
    if toks.first().map(String::as_str) == Some("[") {
        if toks.get(1).map(String::as_str) == Some("[") {
            let n = toks.len();
            if toks[n - 1] != "]" {
                return None;
            }
            let inner = &toks[1..n - 1];
            let mid = inner.iter().position(|t| t == "]")?;
            let lo = parse_ints(&inner[1..mid])?;
            if inner.get(mid + 1).map(String::as_str) != Some("[") || inner.last().map(String::as_str) != Some("]") {
                return None;
            }
            let hi = parse_ints(&inner[mid + 2..inner.len() - 1])?;
            return Some(Value::Box { lo, hi });
        }
        if toks.last().map(String::as_str) != Some("]") {
            return None;
        }
        return Some(Value::Vec(parse_ints(&toks[1..toks.len() - 1])?));
    }
    match rat_scale {
        Some(scale) => parse_scaled(text, scale).map(Value::Rat),
        None => text.parse().ok().map(Value::Int),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_env_forms() {
        let text = "a = 5\nv = [1 -2 3]\np = [[0 0] [4 4]]\nq = {lt [a a] [ ]}\nt = 'gua'\n";
        let env = Env::parse(text, None, &ConstSet::default()).unwrap();
        assert_eq!(env.get("a"), Some(&Value::Int(5)));
        assert_eq!(env.get("v"), Some(&Value::Vec(vec![1, -2, 3])));
        assert_eq!(env.get("p"), Some(&Value::Box { lo: vec![0, 0], hi: vec![4, 4] }));
        assert!(matches!(env.get("q"), Some(Value::Prgm(p)) if p.len() == 1));
        assert_eq!(env.get("t"), Some(&Value::Term("gua".into())));
        assert!(Env::parse("a = 1\na = 2", None, &ConstSet::default()).is_err());
    }

    #[test]
    fn scaled_decimals() {
        assert_eq!(parse_scaled("1.25", 1000), Some(1250));
        assert_eq!(parse_scaled("-0.5", 1000), Some(-500));
        assert_eq!(parse_scaled("0.0001", 1000), None);
        assert_eq!(Value::Rat(-1250).render(1000), "-1.250");
    }
}
