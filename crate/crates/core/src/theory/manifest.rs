//! `theory.thy` manifests and `disjunctions.dat` lines.

use super::{AtomKind, AtomSig, Constant, DisjunctionDef, Numeric, Theory, TheoryError, TypeEntry};
use crate::model::{lex, ConstSet, Program, Statement, Token};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub name: String,
    pub extends: Option<String>,
    numeric: Option<Numeric>,
    abstract_sr: bool,
    types: Vec<TypeEntry>,
    constants: Vec<Constant>,
    atoms: Vec<AtomSig>,
}

fn bracketed(toks: &[&str], at: usize) -> Result<(Vec<String>, usize), String> {
    if toks.get(at) != Some(&"[") {
        return Err(format!("expected `[` at token {}", at + 1));
    }
    let mut out = Vec::new();
    let mut i = at + 1;
    loop {
        match toks.get(i) {
            Some(&"]") => return Ok((out, i + 1)),
            Some(t) => out.push(t.to_string()),
            None => return Err("unterminated list".into()),
        }
        i += 1;
    }
}

impl Manifest {
    pub fn parse(text: &str, file: &str) -> Result<Manifest, TheoryError> {
        let mut m = Manifest {
            name: String::new(),
            extends: None,
            numeric: None,
            abstract_sr: false,
            types: vec![],
            constants: vec![],
            atoms: vec![],
        };
        for (i, raw) in text.lines().enumerate() {
            let err = |reason: String| TheoryError::Manifest { file: file.into(), line: i + 1, reason };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lexed = lex(line);
            let toks: Vec<&str> = lexed.iter().map(String::as_str).collect();
            match toks.as_slice() {
                ["theory", name] => m.name = name.to_string(),
                ["extends", name] => m.extends = Some(name.to_string()),
                ["numeric", "int"] => m.numeric = Some(Numeric::Int),
                ["numeric", "rat"] => m.numeric = Some(Numeric::Rat),
                ["numeric", "none"] => m.numeric = Some(Numeric::None),
                ["substitution", "abstract"] => m.abstract_sr = true,
                ["type", ty, check, eq] => m.types.push(TypeEntry {
                    ty: ty.to_string(),
                    check: check.to_string(),
                    eq: (*eq != "-").then(|| eq.to_string()),
                }),
                ["const", name, ty, rest @ ..] => m.constants.push(Constant {
                    name: name.to_string(),
                    ty: ty.to_string(),
                    value: (!rest.is_empty()).then(|| line.splitn(4, ' ').nth(3).unwrap_or("").trim().to_string()),
                }),
                ["atom", name, kind, ..] => {
                    let kind = match *kind {
                        "chck" => AtomKind::Chck,
                        "asgn" => AtomKind::Asgn,
                        "tasgn" => AtomKind::Tasgn,
                        k => return Err(err(format!("unknown atom kind `{k}`"))),
                    };
                    let (inputs, next) = bracketed(&toks, 3).map_err(&err)?;
                    let (outputs, next) = bracketed(&toks, next).map_err(&err)?;
                    let substitutable = match &toks[next..] {
                        [] => false,
                        ["sr"] => true,
                        other => return Err(err(format!("unexpected trailing `{}`", other.join(" ")))),
                    };
                    m.atoms.push(AtomSig { name: name.to_string(), kind, inputs, outputs, substitutable, hook: None });
                }
                _ => return Err(err(format!("unrecognised directive `{line}`"))),
            }
        }
        if m.name.is_empty() {
            return Err(TheoryError::Manifest { file: file.into(), line: 0, reason: "missing `theory` line".into() });
        }
        Ok(m)
    }

    /// Merge this manifest's declarations into `th` (which may hold a parent theory).
    pub fn apply(&self, th: &mut Theory) -> Result<(), TheoryError> {
        if let Some(n) = self.numeric {
            th.numeric = n;
        }
        th.abstract_sr |= self.abstract_sr;
        if th.parents.is_empty() && self.extends.is_none() {
            th.consts = ConstSet::empty();
        }
        for t in &self.types {
            th.types.retain(|e| e.ty != t.ty);
            th.types.push(t.clone());
        }
        for c in &self.constants {
            match c.name.parse::<i64>() {
                Ok(n) => th.consts.insert_numeric(n),
                Err(_) => th.consts.insert_named(&c.name),
            }
            th.constants.insert(c.name.clone(), c.clone());
        }
        for a in &self.atoms {
            let mut a = a.clone();
            a.hook = Some(format!("{}::{}", self.name, a.name));
            th.atoms.insert(a.name.clone(), a);
        }
        Ok(())
    }
}

fn parse_operand(toks: &[String], at: usize, th: &Theory, line: &str) -> Result<(Program, usize), String> {
    let nstr = th.machine.nstr;
    if toks.get(at).map(String::as_str) == Some("[") {
        let mut i = at + 1;
        let mut stmts = Vec::new();
        while toks.get(i).map(String::as_str) != Some("]") {
            if i >= toks.len() {
                return Err("unterminated operand".into());
            }
            let (s, used) = Statement::parse_tokens(&toks[i..], &th.consts, nstr, line).map_err(|e| e.to_string())?;
            stmts.push(s);
            i += used;
        }
        Ok((Program { stmts }, i + 1))
    } else {
        let (s, used) = Statement::parse_tokens(&toks[at..], &th.consts, nstr, line).map_err(|e| e.to_string())?;
        Ok((Program { stmts: vec![s] }, at + used))
    }
}

/// Type of variable `v` from its first occurrence in `p`.
fn infer_type(v: &str, p: &[Program], th: &Theory) -> Option<String> {
    for prog in p {
        for s in &prog.stmts {
            for (k, t) in s.io_texts().iter().enumerate() {
                if t == v {
                    if let Some(ty) = th.io_type(s, k) {
                        return Some(ty.to_string());
                    }
                }
            }
        }
    }
    None
}

/// Parse `name [ins] [outs] = A | B` against the atoms and disjunctions already in `th`.
pub fn parse_disjunction(line: &str, th: &Theory) -> Result<DisjunctionDef, String> {
    let toks = lex(line);
    let (head, used) = Statement::parse_tokens(&toks, &th.consts, th.machine.nstr, line).map_err(|e| e.to_string())?;
    if toks.get(used).map(String::as_str) != Some("=") {
        return Err("expected `=` after the defined statement".into());
    }
    if th.resolves(&head.name) {
        return Err(format!("`{}` is already defined", head.name));
    }
    let mut operands = Vec::new();
    let mut at = used + 1;
    loop {
        let (op, next) = parse_operand(&toks, at, th, line)?;
        operands.push(op);
        match toks.get(next).map(String::as_str) {
            None => break,
            Some("|") => at = next + 1,
            Some(t) => return Err(format!("unexpected `{t}`")),
        }
    }
    if operands.len() != 2 {
        return Err(format!("expected two operands, found {}", operands.len()));
    }
    let mut inputs = Vec::new();
    for t in &head.inputs {
        match t {
            Token::Var(v) => inputs.push(v.clone()),
            other => return Err(format!("constant `{other}` in a defined statement")),
        }
    }
    for op in &operands {
        for s in &op.stmts {
            if !th.resolves(&s.name) {
                return Err(format!("operand uses unknown atom `{}`", s.name));
            }
        }
        if let Err(errs) = op.validate_structure(&th.consts) {
            return Err(format!("operand is not a valid program: {errs:?}"));
        }
        for v in op.piv() {
            if let Token::Var(v) = v {
                if !inputs.contains(&v) {
                    return Err(format!("operand input `{v}` is not a formal input"));
                }
            }
        }
        let outs = op.outputs();
        for o in &head.outputs {
            if !outs.contains(o) {
                return Err(format!("operand does not assign output `{o}`"));
            }
        }
    }
    let mut input_types = Vec::new();
    for v in &inputs {
        input_types.push(infer_type(v, &operands, th).ok_or_else(|| format!("cannot infer the type of `{v}`"))?);
    }
    let mut output_types = Vec::new();
    for v in &head.outputs {
        output_types.push(infer_type(v, &operands, th).ok_or_else(|| format!("cannot infer the type of `{v}`"))?);
    }
    Ok(DisjunctionDef { name: head.name, inputs, outputs: head.outputs, operands, input_types, output_types })
}
