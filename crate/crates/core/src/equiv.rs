//! Sublists, program equivalence and I/O equivalence (template matching).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{Program, Statement, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Input,
    Output,
}

/// Template variable bindings witnessing an I/O equivalence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    pairs: Vec<(String, Token, Side)>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<&Token> {
        self.pairs.iter().find(|(k, _, _)| k == var).map(|(_, v, _)| v)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn truncate(&mut self, n: usize) {
        self.pairs.truncate(n);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Token, Side)> {
        self.pairs.iter().map(|(k, v, s)| (k.as_str(), v, *s))
    }

    pub fn input_side(&self) -> impl Iterator<Item = (&str, &Token)> {
        self.iter().filter(|(_, _, s)| *s == Side::Input).map(|(k, v, _)| (k, v))
    }

    pub fn output_side(&self) -> impl Iterator<Item = (&str, &Token)> {
        self.iter().filter(|(_, _, s)| *s == Side::Output).map(|(k, v, _)| (k, v))
    }

    pub fn insert(&mut self, var: &str, val: Token, side: Side) {
        self.pairs.push((var.to_string(), val, side));
    }

    /// Image of a template token; constants map to themselves.
    pub fn apply(&self, t: &Token) -> Option<Token> {
        match t {
            Token::Var(v) => self.get(v).cloned(),
            c => Some(c.clone()),
        }
    }

    /// Binds one template input token against an instance token.
    pub fn bind_input(&mut self, tmpl: &Token, inst: &Token) -> bool {
        match tmpl {
            Token::Var(v) => match self.get(v) {
                Some(bound) => bound == inst,
                None => {
                    self.insert(v, inst.clone(), Side::Input);
                    true
                }
            },
            c => c == inst,
        }
    }

    /// Binds one template output variable against an instance output variable.
    pub fn bind_output(&mut self, tmpl: &str, inst: &str) -> bool {
        match self.get(tmpl) {
            Some(bound) => bound.as_var() == Some(inst),
            None => {
                self.insert(tmpl, Token::Var(inst.to_string()), Side::Output);
                true
            }
        }
    }

    /// Extends the substitution so that `tmpl` maps onto `inst`; restores it on failure.
    pub fn bind_statement(&mut self, inst: &Statement, tmpl: &Statement) -> bool {
        if inst.name != tmpl.name
            || inst.inputs.len() != tmpl.inputs.len()
            || inst.outputs.len() != tmpl.outputs.len()
        {
            return false;
        }
        let mark = self.len();
        let ok = tmpl.inputs.iter().zip(&inst.inputs).all(|(t, i)| self.bind_input(t, i))
            && tmpl.outputs.iter().zip(&inst.outputs).all(|(t, i)| self.bind_output(t, i));
        if !ok {
            self.truncate(mark);
        }
        ok
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(k, v, _)| format!("{k}->{v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Why an I/O equivalence attempt failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchFailure {
    /// Programs differ in length.
    Length { instance: usize, template: usize },
    /// Statement names or list lengths differ at a position.
    Shape { position: usize },
    /// Equal template tokens would map to different instance tokens.
    Inconsistent { position: usize, token: String },
    /// A template constant faces a different instance token.
    Constant { position: usize, token: String },
}

/// Tests whether `instance` is I/O equivalent to `template`, returning the witness.
/// The relation is directional: template constants must be matched literally,
/// while template variables may be mapped onto constants.
pub fn io_equiv(instance: &Program, template: &Program) -> Result<Substitution, MatchFailure> {
    if instance.len() != template.len() {
        return Err(MatchFailure::Length { instance: instance.len(), template: template.len() });
    }
    let mut sub = Substitution::new();
    for (k, (i, t)) in instance.stmts.iter().zip(&template.stmts).enumerate() {
        let position = k + 1;
        if i.name != t.name || i.inputs.len() != t.inputs.len() || i.outputs.len() != t.outputs.len() {
            return Err(MatchFailure::Shape { position });
        }
        for (tt, it) in t.inputs.iter().zip(&i.inputs) {
            if !sub.bind_input(tt, it) {
                return Err(if tt.is_const() {
                    MatchFailure::Constant { position, token: tt.to_string() }
                } else {
                    MatchFailure::Inconsistent { position, token: tt.to_string() }
                });
            }
        }
        for (tt, it) in t.outputs.iter().zip(&i.outputs) {
            if !sub.bind_output(tt, it) {
                return Err(MatchFailure::Inconsistent { position, token: tt.clone() });
            }
        }
    }
    Ok(sub)
}

/// Every statement of `b` occurs somewhere in `a`.
pub fn is_sublist(b: &Program, a: &Program) -> bool {
    b.stmts.iter().all(|s| a.stmts.contains(s))
}

/// Strict sublist: `b` is a sublist of `a` but not conversely.
pub fn is_strict_sublist(b: &Program, a: &Program) -> bool {
    is_sublist(b, a) && !is_sublist(a, b)
}

/// A program possibly containing disjunctions of sub-forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Form {
    Stmt(Statement),
    Seq(Vec<Form>),
    Or(Box<Form>, Box<Form>),
}

impl From<&Program> for Form {
    fn from(p: &Program) -> Form {
        Form::Seq(p.stmts.iter().cloned().map(Form::Stmt).collect())
    }
}

type Alternatives = BTreeSet<BTreeSet<Statement>>;

impl Form {
    /// The alternatives as statement sets: `[p (a|b) q]` expands to `[p a q]` and `[p b q]`.
    fn alternatives(&self) -> Alternatives {
        match self {
            Form::Stmt(s) => [[s.clone()].into_iter().collect()].into_iter().collect(),
            Form::Seq(items) => {
                let mut acc: Alternatives = [BTreeSet::new()].into_iter().collect();
                for it in items {
                    let alts = it.alternatives();
                    acc = acc
                        .iter()
                        .flat_map(|a| alts.iter().map(move |b| a.union(b).cloned().collect()))
                        .collect();
                }
                acc
            }
            Form::Or(a, b) => a.alternatives().union(&b.alternatives()).cloned().collect(),
        }
    }
}

/// Program equivalence, extended to disjunctions. Alternatives that `is_false`
/// recognises are dropped as long as at least one alternative survives.
pub fn prgm_equiv_with(u: &Form, v: &Form, is_false: &dyn Fn(&Program) -> bool) -> bool {
    let prune = |alts: Alternatives| -> Alternatives {
        let kept: Alternatives = alts
            .iter()
            .filter(|a| !is_false(&Program { stmts: a.iter().cloned().collect() }))
            .cloned()
            .collect();
        if kept.is_empty() {
            alts
        } else {
            kept
        }
    };
    prune(u.alternatives()) == prune(v.alternatives())
}

pub fn prgm_equiv(u: &Form, v: &Form) -> bool {
    prgm_equiv_with(u, v, &|_| false)
}

/// Plain program equivalence: mutual sublists.
pub fn program_equiv(a: &Program, b: &Program) -> bool {
    is_sublist(a, b) && is_sublist(b, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prog(lines: &[&str]) -> Program {
        Program { stmts: lines.iter().map(|l| Statement::parse(l).unwrap()).collect() }
    }

    #[test]
    fn io_equiv_examples() {
        let s = io_equiv(&prog(&["add [b a] [g]"]), &prog(&["add [a b] [c]"])).unwrap();
        assert_eq!(s.get("a"), Some(&Token::var("b")));
        assert_eq!(s.get("b"), Some(&Token::var("a")));
        assert_eq!(s.get("c"), Some(&Token::var("g")));
        assert!(io_equiv(&prog(&["mult [u u] [w]"]), &prog(&["mult [a b] [c]"])).is_ok());
        let e = io_equiv(&prog(&["mult [u v] [w]"]), &prog(&["mult [a a] [c]"])).unwrap_err();
        assert!(matches!(e, MatchFailure::Inconsistent { position: 1, .. }));
        let c = io_equiv(&prog(&["add [a 1] [b]"]), &prog(&["add [a 0] [b]"])).unwrap_err();
        assert!(matches!(c, MatchFailure::Constant { .. }));
    }

    #[test]
    fn sublist_examples() {
        let a = prog(&["typei [a] [ ]", "typei [b] [ ]", "typei [c] [ ]"]);
        let b = prog(&["typei [a] [ ]", "typei [b] [ ]", "typei [b] [ ]", "typei [a] [ ]"]);
        assert!(is_sublist(&b, &a));
        assert!(is_strict_sublist(&b, &a));
        assert!(is_sublist(&Program::new(), &a));
        let p = prog(&["typei [b] [ ]", "typei [b] [ ]", "typei [c] [ ]", "typei [a] [ ]"]);
        assert!(program_equiv(&p, &a));
    }

    #[test]
    fn disjunction_clauses() {
        let st = |t: &str| Form::Stmt(Statement::parse(t).unwrap());
        let a = st("lt [a b] [ ]");
        let b = st("eqi [a b] [ ]");
        let p = st("typei [a] [ ]");
        let q = st("typei [b] [ ]");
        let ab = Form::Or(Box::new(a.clone()), Box::new(b.clone()));
        let ba = Form::Or(Box::new(b.clone()), Box::new(a.clone()));
        assert!(prgm_equiv(&ab, &ba));
        let dist = Form::Or(
            Box::new(Form::Seq(vec![p.clone(), a.clone(), q.clone()])),
            Box::new(Form::Seq(vec![p.clone(), b.clone(), q.clone()])),
        );
        let fact = Form::Seq(vec![p.clone(), ab.clone(), q.clone()]);
        assert!(prgm_equiv(&dist, &fact));
        let is_false = |x: &Program| x.stmts.iter().any(|s| s.name == "eqi");
        assert!(prgm_equiv_with(&ab, &a, &is_false));
        assert!(!prgm_equiv(&ab, &a));
    }
}
