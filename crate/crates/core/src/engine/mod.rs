//! One-step extended program derivations: rule application, the automated
//! rules `aio`, `sr1`, `sr2`, disjunction contraction and options enumeration.

mod fresh;
mod session;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use fresh::{fresh_name, FreshNames};
pub use session::{ApplyError, Session, SessionLine};

use crate::equiv::Substitution;
use crate::model::{Statement, Token};
use crate::theory::{Conclusion, RuleRecord, Theory};

/// A line of a derivation: a statement, or `:false`.
pub type Line = Option<Statement>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Derived {
    Stmt(Statement),
    False,
}

impl Derived {
    /// Equality with the outputs ignored (outputs are fresh by construction).
    pub fn same_shape(&self, other: &Derived) -> bool {
        match (self, other) {
            (Derived::False, Derived::False) => true,
            (Derived::Stmt(a), Derived::Stmt(b)) => a.same_up_to_outputs(b),
            _ => false,
        }
    }

    pub fn as_line(&self) -> Line {
        match self {
            Derived::Stmt(s) => Some(s.clone()),
            Derived::False => None,
        }
    }

    fn key(&self) -> Option<(String, Vec<Token>, usize)> {
        match self {
            Derived::Stmt(s) => Some((s.name.clone(), s.inputs.clone(), s.outputs.len())),
            Derived::False => None,
        }
    }
}

impl fmt::Display for Derived {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Derived::Stmt(s) => write!(f, "{s}"),
            Derived::False => f.write_str(":false"),
        }
    }
}

/// One candidate derivation step. `refs` are 1-based line labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Step {
    pub label: String,
    /// The two branch rules of a contraction (`label` is then `disj`).
    pub branches: Option<(String, String)>,
    pub refs: Vec<usize>,
    pub result: Derived,
}

impl Step {
    /// The step a justified line claims. A contraction's internal list is
    /// left empty and filled in when the step is applied.
    pub fn from_line(stmt: Line, just: &crate::kernel::Justification) -> Step {
        let result = match stmt {
            Some(s) => Derived::Stmt(s),
            None => Derived::False,
        };
        match just {
            crate::kernel::Justification::Cite { label, refs } => {
                Step { label: label.clone(), branches: None, refs: refs.clone(), result }
            }
            crate::kernel::Justification::Disj { left, right } => {
                Step { label: "disj".into(), branches: Some((left.clone(), right.clone())), refs: vec![], result }
            }
        }
    }

    /// The justification column: `label [refs]`, `label` or `disj [A B]`.
    pub fn justification(&self) -> String {
        match &self.branches {
            Some((a, b)) => format!("disj [{a} {b}]"),
            None if self.refs.is_empty() => self.label.clone(),
            None => {
                let r: Vec<String> = self.refs.iter().map(usize::to_string).collect();
                format!("{} [{}]", self.label, r.join(" "))
            }
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}    {}", self.result, self.justification())
    }
}

/// Which lines a rule's premises may be matched against (0-based indices).
#[derive(Debug, Clone, Copy)]
pub enum Pick<'a> {
    /// Exactly these cited lines, in any assignment order.
    Fixed(&'a [usize]),
    /// Any lines; a line may be reused only when it has no outputs.
    Any,
}

/// Names used anywhere in the lines plus the theory's named constants.
pub fn used_names(th: &Theory, lines: &[Line]) -> HashSet<String> {
    let mut used: HashSet<String> = th.consts.named().map(str::to_string).collect();
    for s in lines.iter().flatten() {
        used.extend(s.io_texts());
    }
    used
}

struct Matcher<'a> {
    lines: &'a [Line],
    by_name: HashMap<&'a str, Vec<usize>>,
    tmpl: &'a [Statement],
    pick: Pick<'a>,
    chosen: Vec<usize>,
    taken: Vec<bool>,
    sigma: Substitution,
}

impl<'a> Matcher<'a> {
    fn run(&mut self, depth: usize, f: &mut dyn FnMut(&[usize], &Substitution) -> bool) -> bool {
        if depth == self.tmpl.len() {
            return f(&self.chosen, &self.sigma);
        }
        let t = &self.tmpl[depth];
        let candidates: Vec<(usize, usize)> = match self.pick {
            Pick::Fixed(refs) => refs.iter().enumerate().map(|(slot, &l)| (slot, l)).collect(),
            Pick::Any => match self.by_name.get(t.name.as_str()) {
                Some(ls) => ls.iter().map(|&l| (l, l)).collect(),
                None => return false,
            },
        };
        for (slot, l) in candidates {
            let Some(inst) = self.lines.get(l).and_then(Option::as_ref) else { continue };
            if inst.name != t.name {
                continue;
            }
            let reusable = matches!(self.pick, Pick::Any) && inst.outputs.is_empty();
            if self.taken[slot] && !reusable {
                continue;
            }
            let mark = self.sigma.len();
            if !self.sigma.bind_statement(inst, t) {
                continue;
            }
            let was = self.taken[slot];
            self.taken[slot] = true;
            self.chosen.push(l);
            let stop = self.run(depth + 1, f);
            self.chosen.pop();
            self.taken[slot] = was;
            self.sigma.truncate(mark);
            if stop {
                return true;
            }
        }
        false
    }
}

/// Enumerates assignments of lines to the template premises; `f` returns true to stop.
pub fn match_premise(
    lines: &[Line],
    tmpl: &[Statement],
    pick: Pick<'_>,
    f: &mut dyn FnMut(&[usize], &Substitution) -> bool,
) -> bool {
    if let Pick::Fixed(refs) = pick {
        if refs.len() != tmpl.len() {
            return false;
        }
    }
    let slots = match pick {
        Pick::Fixed(refs) => refs.len(),
        Pick::Any => lines.len(),
    };
    let mut by_name: HashMap<&str, Vec<usize>> = HashMap::new();
    if let Pick::Any = pick {
        for (k, l) in lines.iter().enumerate() {
            if let Some(s) = l {
                by_name.entry(s.name.as_str()).or_default().push(k);
            }
        }
        if tmpl.iter().any(|t| !by_name.contains_key(t.name.as_str())) {
            return false;
        }
    }
    let mut m =
        Matcher { lines, by_name, tmpl, pick, chosen: vec![], taken: vec![false; slots], sigma: Substitution::new() };
    m.run(0, f)
}

fn instantiate_inputs(concl: &Statement, sigma: &Substitution) -> Option<Vec<Token>> {
    concl.inputs.iter().map(|t| sigma.apply(t)).collect()
}

/// Statement with the given inputs and fresh outputs.
fn with_fresh(name: &str, inputs: Vec<Token>, nout: usize, fresh: &[String]) -> Statement {
    Statement { name: name.to_string(), inputs, outputs: fresh[..nout].to_vec() }
}

/// Enumeration context over a fixed line list.
pub struct Deriver<'a> {
    pub th: &'a Theory,
    pub lines: &'a [Line],
    fresh: Vec<String>,
}

impl<'a> Deriver<'a> {
    pub fn new(th: &'a Theory, lines: &'a [Line]) -> Self {
        Self::with_reserved(th, lines, &[])
    }

    /// Fresh outputs avoid `reserved` as well as every name in `lines`.
    pub fn with_reserved(th: &'a Theory, lines: &'a [Line], reserved: &[String]) -> Self {
        let mut used = used_names(th, lines);
        used.extend(reserved.iter().cloned());
        let mut gen = FreshNames::new(used);
        let fresh = (0..8).map(|_| gen.next_name()).collect();
        Deriver { th, lines, fresh }
    }

    fn line(&self, i: usize) -> Option<&Statement> {
        self.lines.get(i).and_then(Option::as_ref)
    }

    /// Applies a stored rule; results carry fresh outputs.
    pub fn rule(&self, rule: &RuleRecord, pick: Pick<'_>, f: &mut dyn FnMut(&[usize], Derived) -> bool) -> bool {
        let concl = match &rule.conclusion {
            Conclusion::False => None,
            Conclusion::Program(p) if p.len() == 1 => Some(&p.stmts[0]),
            Conclusion::Program(_) => return false,
        };
        let premise = &rule.premise.stmts;
        match_premise(self.lines, premise, pick, &mut |chosen, sigma| match concl {
            None => f(chosen, Derived::False),
            Some(c) => match instantiate_inputs(c, sigma) {
                Some(ins) => f(chosen, Derived::Stmt(with_fresh(&c.name, ins, c.outputs.len(), &self.fresh))),
                None => false,
            },
        })
    }

    /// I/O type checks of line `k`, one per typed I/O element.
    pub fn aio_at(&self, k: usize) -> Vec<Statement> {
        let Some(s) = self.line(k) else { return vec![] };
        let mut out = Vec::new();
        let elems: Vec<Token> =
            s.inputs.iter().cloned().chain(s.outputs.iter().map(|o| Token::Var(o.clone()))).collect();
        for (pos, tok) in elems.into_iter().enumerate() {
            let Some(ty) = self.th.io_type(s, pos) else { continue };
            let Some(entry) = self.th.type_entry(ty) else { continue };
            let st = Statement { name: entry.check.clone(), inputs: vec![tok], outputs: vec![] };
            if !out.contains(&st) {
                out.push(st);
            }
        }
        out
    }

    fn eq_parts(&self, j: usize) -> Option<(&str, &Token, &Token)> {
        let e = self.line(j)?;
        let entry = self.th.type_of_eq_atom(&e.name)?;
        if e.inputs.len() != 2 {
            return None;
        }
        Some((entry.ty.as_str(), &e.inputs[0], &e.inputs[1]))
    }

    /// `sr1 [i j]`: substitute one input position of line `i` using the equality at line `j`.
    pub fn sr1_at(&self, i: usize, j: usize) -> Vec<Statement> {
        let (Some(p), Some((ty, x, a))) = (self.line(i), self.eq_parts(j)) else { return vec![] };
        if !self.th.is_substitutable(&p.name) {
            return vec![];
        }
        let mut out = Vec::new();
        for (k, tok) in p.inputs.iter().enumerate() {
            if tok != x || self.th.io_type(p, k) != Some(ty) {
                continue;
            }
            let mut ins = p.inputs.clone();
            ins[k] = a.clone();
            let st = with_fresh(&p.name, ins, p.outputs.len(), &self.fresh);
            if !out.contains(&st) {
                out.push(st);
            }
        }
        out
    }

    /// `sr2 [i j l]`: equal outputs of line `i` and its substituted copy at line `l`.
    pub fn sr2_at(&self, i: usize, j: usize, l: usize) -> Vec<Statement> {
        let (Some(p), Some((ty, x, a)), Some(q)) = (self.line(i), self.eq_parts(j), self.line(l)) else {
            return vec![];
        };
        if p.name != q.name || p.outputs.is_empty() || !self.th.is_substitutable(&p.name) {
            return vec![];
        }
        let n = p.inputs.len();
        if q.inputs.len() != n || q.outputs.len() != p.outputs.len() {
            return vec![];
        }
        let substituted = (0..n).any(|k| {
            p.inputs[k] == *x
                && q.inputs[k] == *a
                && self.th.io_type(p, k) == Some(ty)
                && (0..n).all(|m| m == k || p.inputs[m] == q.inputs[m])
        });
        if !substituted {
            return vec![];
        }
        let mut out = Vec::new();
        for m in 0..p.outputs.len() {
            let Some(oty) = self.th.io_type(p, n + m) else { continue };
            let Some(eq) = self.th.type_entry(oty).and_then(|e| e.eq.clone()) else { continue };
            let nout = self.th.atoms.get(&eq).map_or(0, |a| a.outputs.len());
            let ins = vec![Token::Var(q.outputs[m].clone()), Token::Var(p.outputs[m].clone())];
            out.push(with_fresh(&eq, ins, nout, &self.fresh));
        }
        out
    }

    fn indices(&self, pick: Pick<'_>, arity: usize) -> Vec<Vec<usize>> {
        match pick {
            Pick::Fixed(r) if r.len() == arity => vec![r.to_vec()],
            Pick::Fixed(_) => vec![],
            Pick::Any => {
                let n = self.lines.len();
                let mut out: Vec<Vec<usize>> = vec![vec![]];
                for _ in 0..arity {
                    out = out
                        .into_iter()
                        .flat_map(|v| (0..n).map(move |k| [v.clone(), vec![k]].concat()))
                        .collect();
                }
                out
            }
        }
    }

    /// Results of the rule `label` (automated or stored) over the picked lines.
    pub fn derive(&self, label: &str, pick: Pick<'_>, f: &mut dyn FnMut(&[usize], Derived) -> bool) -> bool {
        match label {
            "aio" => {
                for r in self.indices(pick, 1) {
                    for s in self.aio_at(r[0]) {
                        if f(&r, Derived::Stmt(s)) {
                            return true;
                        }
                    }
                }
                false
            }
            "sr1" => {
                let eq_lines: Vec<usize> = (0..self.lines.len()).filter(|&j| self.eq_parts(j).is_some()).collect();
                let pairs: Vec<Vec<usize>> = match pick {
                    Pick::Any => (0..self.lines.len())
                        .flat_map(|i| eq_lines.iter().map(move |&j| vec![i, j]))
                        .collect(),
                    p => self.indices(p, 2),
                };
                for r in pairs {
                    for s in self.sr1_at(r[0], r[1]) {
                        if f(&r, Derived::Stmt(s)) {
                            return true;
                        }
                    }
                }
                false
            }
            "sr2" => {
                let triples: Vec<Vec<usize>> = match pick {
                    Pick::Any => {
                        let eq_lines: Vec<usize> =
                            (0..self.lines.len()).filter(|&j| self.eq_parts(j).is_some()).collect();
                        let mut by_name: HashMap<&str, Vec<usize>> = HashMap::new();
                        for (k, l) in self.lines.iter().enumerate() {
                            if let Some(s) = l {
                                if !s.outputs.is_empty() {
                                    by_name.entry(s.name.as_str()).or_default().push(k);
                                }
                            }
                        }
                        let mut v = Vec::new();
                        for group in by_name.values() {
                            for &i in group {
                                for &l in group {
                                    if i != l {
                                        for &j in &eq_lines {
                                            v.push(vec![i, j, l]);
                                        }
                                    }
                                }
                            }
                        }
                        v.sort();
                        v
                    }
                    p => self.indices(p, 3),
                };
                for r in triples {
                    for s in self.sr2_at(r[0], r[1], r[2]) {
                        if f(&r, Derived::Stmt(s)) {
                            return true;
                        }
                    }
                }
                false
            }
            _ => match self.th.store.get(label) {
                Some(rule) => self.rule(rule, pick, f),
                None => false,
            },
        }
    }

    /// Every one-step result from the stored rules and the automated rules.
    pub fn all_steps(&self) -> Vec<Step> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut labels: Vec<String> = vec!["aio".into(), "sr1".into(), "sr2".into()];
        labels.extend(self.th.store.labels());
        for label in labels {
            self.derive(&label, Pick::Any, &mut |refs, d| {
                let step = Step {
                    label: label.clone(),
                    branches: None,
                    refs: refs.iter().map(|r| r + 1).collect(),
                    result: d,
                };
                if seen.insert(step.clone()) {
                    out.push(step);
                }
                false
            });
        }
        out
    }

    /// Whether `label` derives `target` (up to outputs); returns the 0-based connection list.
    pub fn derives(&self, label: &str, pick: Pick<'_>, target: &Derived) -> Option<Vec<usize>> {
        let mut found = None;
        self.derive(label, pick, &mut |refs, d| {
            if d.same_shape(target) {
                found = Some(refs.to_vec());
                true
            } else {
                false
            }
        });
        found
    }
}

/// One operand of a split line: the line list with the split statement
/// replaced by the operand's statements.
#[derive(Debug, Clone)]
pub struct OperandProgram {
    pub lines: Vec<Line>,
    /// Original 0-based index of each operand-program line.
    pub origin: Vec<usize>,
    /// Variables introduced by the operand that do not occur in the original lines.
    pub internal: Vec<String>,
}

impl OperandProgram {
    pub fn map_back(&self, refs: &[usize]) -> Vec<usize> {
        refs.iter().map(|&r| self.origin[r]).collect()
    }
}

/// The two operand programs for the split of line `s`, or `None` when the line is not a disjunction.
pub fn split_line(th: &Theory, lines: &[Line], s: usize, reserved: &[String]) -> Option<[OperandProgram; 2]> {
    let stmt = lines.get(s)?.as_ref()?;
    let def = th.disjunctions.get(&stmt.name)?;
    let mut used = used_names(th, lines);
    used.extend(reserved.iter().cloned());
    let mut fresh = FreshNames::new(used);
    let mut make = |op: &crate::model::Program| {
        let mut map: HashMap<String, Token> = HashMap::new();
        for (f, t) in def.inputs.iter().zip(&stmt.inputs) {
            map.insert(f.clone(), t.clone());
        }
        for (f, t) in def.outputs.iter().zip(&stmt.outputs) {
            map.insert(f.clone(), Token::Var(t.clone()));
        }
        let mut internal = Vec::new();
        let mut stmts = Vec::new();
        for st in &op.stmts {
            let mut rename = |v: &str, internal: &mut Vec<String>| -> Token {
                map.entry(v.to_string())
                    .or_insert_with(|| {
                        let n = fresh.next_name();
                        internal.push(n.clone());
                        Token::Var(n)
                    })
                    .clone()
            };
            let inputs = st
                .inputs
                .iter()
                .map(|t| match t {
                    Token::Var(v) => rename(v, &mut internal),
                    c => c.clone(),
                })
                .collect();
            let outputs = st.outputs.iter().map(|o| rename(o, &mut internal).to_string()).collect();
            stmts.push(Statement { name: st.name.clone(), inputs, outputs });
        }
        let mut plines = Vec::new();
        let mut origin = Vec::new();
        for (k, l) in lines.iter().enumerate() {
            if k == s {
                for st in &stmts {
                    plines.push(Some(st.clone()));
                    origin.push(s);
                }
            } else {
                plines.push(l.clone());
                origin.push(k);
            }
        }
        OperandProgram { lines: plines, origin, internal }
    };
    Some([make(&def.operands[0]), make(&def.operands[1])])
}

/// A verified contraction: the split line and the internal connection list (0-based, sorted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    pub split: usize,
    pub refs: Vec<usize>,
}

fn leaks(d: &Derived, internal: &[String]) -> bool {
    match d {
        Derived::Stmt(s) => s.input_vars().any(|v| internal.iter().any(|i| i == v)),
        Derived::False => false,
    }
}

/// Verifies `disj [a b]` deriving `target` from one of the starred lines.
pub fn check_contraction(
    th: &Theory,
    lines: &[Line],
    starred: &[usize],
    a: &str,
    b: &str,
    target: &Derived,
) -> Option<Contraction> {
    let reserved: Vec<String> = match target {
        Derived::Stmt(s) => s.outputs.clone(),
        Derived::False => vec![],
    };
    for &s in starred {
        let Some([pa, pb]) = split_line(th, lines, s, &reserved) else { continue };
        let branch = |p: &OperandProgram, label: &str| -> Option<(Vec<usize>, bool)> {
            let d = Deriver::with_reserved(th, &p.lines, &reserved);
            if let Some(r) = d.derives(label, Pick::Any, target) {
                return Some((p.map_back(&r), false));
            }
            if *target != Derived::False {
                if let Some(r) = d.derives(label, Pick::Any, &Derived::False) {
                    return Some((p.map_back(&r), true));
                }
            }
            None
        };
        let (Some((ra, fa)), Some((rb, fb))) = (branch(&pa, a), branch(&pb, b)) else { continue };
        if fa && fb {
            continue;
        }
        if leaks(target, &pa.internal) {
            continue;
        }
        let refs: BTreeSet<usize> = ra.into_iter().chain(rb).chain([s]).collect();
        return Some(Contraction { split: s, refs: refs.into_iter().collect() });
    }
    None
}

/// Contraction options for the starred lines: pairs of equal branch results, with false branches.
pub fn contraction_steps(th: &Theory, lines: &[Line], starred: &[usize]) -> Vec<Step> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let base = Deriver::new(th, lines);
    for &s in starred {
        let Some([pa, pb]) = split_line(th, lines, s, &[]) else { continue };
        let steps_a = Deriver::new(th, &pa.lines).all_steps();
        let steps_b = Deriver::new(th, &pb.lines).all_steps();
        let group = |steps: &[Step], p: &OperandProgram| {
            let mut m: BTreeMap<Option<(String, Vec<Token>, usize)>, Vec<(String, Vec<usize>, Derived)>> = BTreeMap::new();
            for st in steps {
                if leaks(&st.result, &p.internal) {
                    continue;
                }
                let refs: Vec<usize> = st.refs.iter().map(|r| p.origin[r - 1]).collect();
                m.entry(st.result.key()).or_default().push((st.label.clone(), refs, st.result.clone()));
            }
            m
        };
        let ga = group(&steps_a, &pa);
        let gb = group(&steps_b, &pb);
        let empty = Vec::new();
        let fa = ga.get(&None).unwrap_or(&empty);
        let fb = gb.get(&None).unwrap_or(&empty);
        let mut emit = |la: &str, ra: &[usize], lb: &str, rb: &[usize], d: &Derived| {
            let refs: BTreeSet<usize> = ra.iter().chain(rb).copied().chain([s]).map(|r| r + 1).collect();
            let result = match d {
                Derived::Stmt(st) => Derived::Stmt(Statement {
                    name: st.name.clone(),
                    inputs: st.inputs.clone(),
                    outputs: base.fresh[..st.outputs.len()].to_vec(),
                }),
                Derived::False => Derived::False,
            };
            let step = Step {
                label: "disj".into(),
                branches: Some((la.to_string(), lb.to_string())),
                refs: refs.into_iter().collect(),
                result,
            };
            if seen.insert(step.clone()) {
                out.push(step);
            }
        };
        for (key, list_a) in &ga {
            if key.is_none() {
                for (la, ra, _) in list_a {
                    for (lb, rb, _) in fb {
                        emit(la, ra, lb, rb, &Derived::False);
                    }
                }
                continue;
            }
            let list_b = gb.get(key).unwrap_or(&empty);
            for (la, ra, d) in list_a {
                for (lb, rb, _) in list_b.iter().chain(fb) {
                    emit(la, ra, lb, rb, d);
                }
            }
        }
        for (key, list_b) in &gb {
            if key.is_none() {
                continue;
            }
            for (lb, rb, d) in list_b {
                for (la, ra, _) in fa {
                    emit(la, ra, lb, rb, d);
                }
            }
        }
    }
    out
}

/// All options at the end of `lines`: one-step results plus contractions of starred lines.
pub fn options(th: &Theory, lines: &[Line], starred: &[usize]) -> Vec<Step> {
    let mut steps = Deriver::new(th, lines).all_steps();
    steps.extend(contraction_steps(th, lines, starred));
    steps
}
