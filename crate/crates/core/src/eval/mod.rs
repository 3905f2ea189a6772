//! Bounded execution of zeroth-order programs.

mod certify;
pub mod interval;
pub mod maps;
mod value;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use certify::{certify_axc5, range_oracle, CertifyError, Certificate};
pub use maps::{AppMap, ArithMap, CellularAutomaton, Expr};
pub use value::{parse_scaled, parse_value, Env, EnvError, Value};

use crate::equiv::{io_equiv, is_sublist, program_equiv};
use crate::mach::MachParams;
use crate::model::{Program, Statement, Token};
use crate::theory::{DisjunctionDef, Numeric, Theory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExecErrorKind {
    TypeViolation,
    Overflow,
    DivisionError,
    DimMismatch,
    RelationFailure,
    DisjunctionViolation,
    DeadlineExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{kind:?} at statement {site}: {detail}")]
pub struct ExecError {
    pub kind: ExecErrorKind,
    /// 1-based statement index (0 when raised outside a program).
    pub site: usize,
    pub detail: String,
}

fn fail<T>(kind: ExecErrorKind, detail: impl Into<String>) -> Result<T, ExecError> {
    Err(ExecError { kind, site: 0, detail: detail.into() })
}

/// Atoms with executable semantics; disjunctions execute through their operands.
pub const EXECUTABLE_ATOMS: [&str; 29] = [
    "typei", "eqi", "lt", "add", "mult", "div", "typev", "eqv", "dim", "ltv", "lev", "addv", "smult", "zvec", "typebx",
    "eqbx", "eltbx", "subbx", "lbx", "ubx", "box", "f", "iterf", "boundf", "typep", "eqp", "eqio", "sub", "conc",
];

/// Executes programs of one theory under machine parameters, counting
/// statement executions against `mach.tcpu`.
pub struct Evaluator<'a> {
    pub th: &'a Theory,
    pub mach: MachParams,
    map: Option<&'a dyn AppMap>,
    steps: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(th: &'a Theory, mach: MachParams) -> Self {
        Evaluator { th, mach, map: None, steps: 0 }
    }

    /// Binds the atoms `f`, `iterf` and `boundf` to `map`.
    pub fn with_map(mut self, map: &'a dyn AppMap) -> Self {
        self.map = Some(map);
        self
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn scale(&self) -> i64 {
        match self.th.numeric {
            Numeric::Rat => self.mach.scale(),
            _ => 1,
        }
    }

    fn tick(&mut self) -> Result<(), ExecError> {
        self.steps += 1;
        if self.steps > self.mach.tcpu {
            return fail(ExecErrorKind::DeadlineExceeded, format!("step budget {} exhausted", self.mach.tcpu));
        }
        Ok(())
    }

    /// Runs `p` on `input`, returning every binding (inputs and all outputs).
    pub fn eval(&mut self, p: &Program, input: &Env) -> Result<Env, ExecError> {
        for v in p.free() {
            if !input.contains(&v) {
                return Err(ExecError { kind: ExecErrorKind::TypeViolation, site: 0, detail: format!("free variable `{v}` is unbound") });
            }
        }
        let mut env = input.clone();
        for (k, s) in p.stmts.iter().enumerate() {
            self.exec(s, &mut env).map_err(|mut e| {
                if e.site == 0 {
                    e.site = k + 1;
                }
                e
            })?;
        }
        Ok(env)
    }

    fn exec(&mut self, s: &Statement, env: &mut Env) -> Result<(), ExecError> {
        self.tick()?;
        let args = s.inputs.iter().map(|t| self.token_value(t, env)).collect::<Result<Vec<_>, _>>()?;
        let outs = match self.th.disjunctions.get(&s.name) {
            Some(def) => self.disjunction(def, args)?,
            None => self.atom(&s.name, args)?,
        };
        if outs.len() != s.outputs.len() {
            return fail(ExecErrorKind::TypeViolation, format!("`{}` produced {} values for {} outputs", s.name, outs.len(), s.outputs.len()));
        }
        for (name, v) in s.outputs.iter().zip(outs) {
            if env.contains(name) {
                return fail(ExecErrorKind::TypeViolation, format!("`{name}` is already bound"));
            }
            env.insert(name, v);
        }
        Ok(())
    }

    fn token_value(&self, t: &Token, env: &Env) -> Result<Value, ExecError> {
        match t {
            Token::Var(v) => env.get(v).cloned().map_or_else(|| fail(ExecErrorKind::TypeViolation, format!("`{v}` is unbound")), Ok),
            Token::Num(n) => Ok(match self.th.numeric {
                Numeric::Rat => Value::Rat(n * self.scale()),
                _ => Value::Int(*n),
            }),
            Token::Const(c) => self.constant(c),
        }
    }

    fn constant(&self, name: &str) -> Result<Value, ExecError> {
        let Some(c) = self.th.constants.get(name) else {
            return fail(ExecErrorKind::TypeViolation, format!("unknown constant `{name}`"));
        };
        match c.ty.as_str() {
            "prgm" => {
                let text = c.value.clone().unwrap_or_default();
                let p = Program::parse_lines(&text, &self.th.consts, self.mach.nstr)
                    .map_err(|e| ExecError { kind: ExecErrorKind::TypeViolation, site: 0, detail: e.to_string() })?;
                Ok(Value::Prgm(p))
            }
            _ => Ok(Value::Term(name.to_string())),
        }
    }

    fn disjunction(&mut self, def: &DisjunctionDef, args: Vec<Value>) -> Result<Vec<Value>, ExecError> {
        let mut results: Vec<Vec<Value>> = Vec::new();
        let mut last = None;
        for op in &def.operands {
            let mut env = Env::new();
            for (f, v) in def.inputs.iter().zip(&args) {
                env.insert(f, v.clone());
            }
            match self.eval(op, &env) {
                Ok(out) => results.push(def.outputs.iter().filter_map(|o| out.get(o).cloned()).collect()),
                Err(e) if e.kind == ExecErrorKind::DeadlineExceeded => return Err(ExecError { site: 0, ..e }),
                Err(e) => last = Some(e),
            }
        }
        match results.as_slice() {
            [] => {
                let e = last.expect("two operands");
                fail(e.kind, format!("no operand of `{}` computes: {}", def.name, e.detail))
            }
            [first, rest @ ..] => {
                if rest.iter().any(|r| r != first) {
                    return fail(ExecErrorKind::DisjunctionViolation, format!("operands of `{}` disagree", def.name));
                }
                Ok(first.clone())
            }
        }
    }

    fn num(&self, v: &Value) -> Result<i64, ExecError> {
        let x = match (self.th.numeric, v) {
            (Numeric::Rat, Value::Rat(k)) => *k,
            (Numeric::Rat, _) => return fail(ExecErrorKind::TypeViolation, format!("expected rat, found {}", v.kind())),
            (_, Value::Int(i)) => *i,
            _ => return fail(ExecErrorKind::TypeViolation, format!("expected int, found {}", v.kind())),
        };
        if x.abs() > self.mach.nint {
            return fail(ExecErrorKind::TypeViolation, format!("{x} is outside [-nint, nint]"));
        }
        Ok(x)
    }

    fn mk_num(&self, x: i128) -> Result<Value, ExecError> {
        if x.abs() > self.mach.nint as i128 {
            return fail(ExecErrorKind::Overflow, format!("{x} exceeds nint {}", self.mach.nint));
        }
        Ok(match self.th.numeric {
            Numeric::Rat => Value::Rat(x as i64),
            _ => Value::Int(x as i64),
        })
    }

    fn int(&self, v: &Value) -> Result<i64, ExecError> {
        match v {
            Value::Int(i) if i.abs() <= self.mach.nint => Ok(*i),
            _ => fail(ExecErrorKind::TypeViolation, format!("expected int, found {v}")),
        }
    }

    fn vector(&self, v: &Value) -> Result<Vec<i64>, ExecError> {
        match v {
            Value::Vec(x) if !x.is_empty() && x.len() <= self.mach.nlst && x.iter().all(|e| e.abs() <= self.mach.nint) => {
                Ok(x.clone())
            }
            _ => fail(ExecErrorKind::TypeViolation, format!("expected vec, found {v}")),
        }
    }

    fn boxed(&self, v: &Value) -> Result<(Vec<i64>, Vec<i64>), ExecError> {
        match v {
            Value::Box { lo, hi } => {
                let lo = self.vector(&Value::Vec(lo.clone()))?;
                let hi = self.vector(&Value::Vec(hi.clone()))?;
                if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| a > b) {
                    return fail(ExecErrorKind::TypeViolation, format!("{v} is not a box"));
                }
                Ok((lo, hi))
            }
            _ => fail(ExecErrorKind::TypeViolation, format!("expected box, found {v}")),
        }
    }

    fn prgm<'v>(&self, v: &'v Value) -> Result<&'v Program, ExecError> {
        match v {
            Value::Prgm(p) => Ok(p),
            _ => fail(ExecErrorKind::TypeViolation, format!("expected prgm, found {}", v.kind())),
        }
    }

    fn same_dim(a: &[i64], b: &[i64]) -> Result<(), ExecError> {
        if a.len() != b.len() {
            return fail(ExecErrorKind::DimMismatch, format!("dimensions {} and {}", a.len(), b.len()));
        }
        Ok(())
    }

    fn relation(ok: bool, what: impl FnOnce() -> String) -> Result<Vec<Value>, ExecError> {
        if ok {
            Ok(vec![])
        } else {
            fail(ExecErrorKind::RelationFailure, what())
        }
    }

    fn elementwise(&self, a: &[i64], b: &[i64], op: impl Fn(i128, i128) -> i128) -> Result<Vec<i64>, ExecError> {
        Self::same_dim(a, b)?;
        a.iter()
            .zip(b)
            .map(|(&x, &y)| {
                let r = op(x as i128, y as i128);
                if r.abs() > self.mach.nint as i128 {
                    fail(ExecErrorKind::Overflow, format!("{r} exceeds nint {}", self.mach.nint))
                } else {
                    Ok(r as i64)
                }
            })
            .collect()
    }

    fn app_map(&self) -> Result<&'a dyn AppMap, ExecError> {
        self.map.map_or_else(|| fail(ExecErrorKind::TypeViolation, "no map is bound to `f`"), Ok)
    }

    /// `n`-fold application of `f` to `v`; each application costs one step.
    pub fn iterf(&mut self, v: &[i64], n: i64) -> Result<Vec<i64>, ExecError> {
        if n < 0 {
            return fail(ExecErrorKind::RelationFailure, format!("iteration count {n} is negative"));
        }
        let map = self.app_map()?;
        let mut w = v.to_vec();
        for t in 1..=n {
            self.tick()?;
            w = map.apply(&w, self.mach.nint).map_err(|e| ExecError { detail: format!("step {t}: {}", e.detail), ..e })?;
        }
        Ok(w)
    }

    fn atom(&mut self, name: &str, a: Vec<Value>) -> Result<Vec<Value>, ExecError> {
        let Some(sig) = self.th.atoms.get(name) else {
            return fail(ExecErrorKind::TypeViolation, format!("unknown atom `{name}`"));
        };
        if sig.inputs.len() != a.len() {
            return fail(ExecErrorKind::TypeViolation, format!("`{name}` takes {} inputs", sig.inputs.len()));
        }
        let scale = self.scale() as i128;
        match name {
            "typei" => self.num(&a[0]).map(|_| vec![]),
            "eqi" => {
                let (x, y) = (self.num(&a[0])?, self.num(&a[1])?);
                Self::relation(x == y, || format!("{x} != {y}"))
            }
            "lt" => {
                let (x, y) = (self.num(&a[0])?, self.num(&a[1])?);
                Self::relation(x < y, || format!("not {x} < {y}"))
            }
            "add" => {
                let (x, y) = (self.num(&a[0])? as i128, self.num(&a[1])? as i128);
                Ok(vec![self.mk_num(x + y)?])
            }
            "mult" => {
                let p = self.num(&a[0])? as i128 * self.num(&a[1])? as i128;
                if p % scale != 0 {
                    return fail(ExecErrorKind::Overflow, "product underflows the resolution");
                }
                Ok(vec![self.mk_num(p / scale)?])
            }
            "div" => {
                let (x, y) = (self.num(&a[0])? as i128 * scale, self.num(&a[1])? as i128);
                if y == 0 {
                    return fail(ExecErrorKind::DivisionError, "division by zero");
                }
                if x % y != 0 {
                    return fail(ExecErrorKind::DivisionError, format!("{y} does not divide {x}"));
                }
                Ok(vec![self.mk_num(x / y)?])
            }
            "typev" => self.vector(&a[0]).map(|_| vec![]),
            "eqv" => {
                let (x, y) = (self.vector(&a[0])?, self.vector(&a[1])?);
                Self::same_dim(&x, &y)?;
                Self::relation(x == y, || "vectors differ".into())
            }
            "dim" => {
                let (x, y) = (self.vector(&a[0])?, self.vector(&a[1])?);
                Self::relation(x.len() == y.len(), || format!("dimensions {} and {}", x.len(), y.len()))
            }
            "ltv" | "lev" => {
                let (x, y) = (self.vector(&a[0])?, self.vector(&a[1])?);
                Self::same_dim(&x, &y)?;
                let ok = x.iter().zip(&y).all(|(p, q)| if name == "ltv" { p < q } else { p <= q });
                Self::relation(ok, || format!("{name} fails"))
            }
            "addv" => {
                let (x, y) = (self.vector(&a[0])?, self.vector(&a[1])?);
                Ok(vec![Value::Vec(self.elementwise(&x, &y, |p, q| p + q)?)])
            }
            "smult" => {
                let s = self.int(&a[0])?;
                let x = self.vector(&a[1])?;
                Ok(vec![Value::Vec(self.elementwise(&vec![s; x.len()], &x, |p, q| p * q)?)])
            }
            "zvec" => {
                let x = self.vector(&a[0])?;
                Ok(vec![Value::Vec(vec![0; x.len()])])
            }
            "typebx" => self.boxed(&a[0]).map(|_| vec![]),
            "eqbx" => {
                let (p, q) = (self.boxed(&a[0])?, self.boxed(&a[1])?);
                Self::same_dim(&p.0, &q.0)?;
                Self::relation(p == q, || "boxes differ".into())
            }
            "eltbx" => {
                let v = self.vector(&a[0])?;
                let (lo, hi) = self.boxed(&a[1])?;
                Self::same_dim(&v, &lo)?;
                let ok = v.iter().zip(lo.iter().zip(&hi)).all(|(x, (l, h))| l <= x && x <= h);
                Self::relation(ok, || "vector outside the box".into())
            }
            "subbx" => {
                let (q, p) = (self.boxed(&a[0])?, self.boxed(&a[1])?);
                Self::same_dim(&q.0, &p.0)?;
                let ok = p.0.iter().zip(&q.0).all(|(x, y)| x <= y) && q.1.iter().zip(&p.1).all(|(x, y)| x <= y);
                Self::relation(ok, || "box is not contained".into())
            }
            "lbx" => Ok(vec![Value::Vec(self.boxed(&a[0])?.0)]),
            "ubx" => Ok(vec![Value::Vec(self.boxed(&a[0])?.1)]),
            "box" => {
                let (lo, hi) = (self.vector(&a[0])?, self.vector(&a[1])?);
                Self::same_dim(&lo, &hi)?;
                if lo.iter().zip(&hi).any(|(l, h)| l > h) {
                    return fail(ExecErrorKind::RelationFailure, "lower bound exceeds upper bound");
                }
                Ok(vec![Value::Box { lo, hi }])
            }
            "f" => {
                let v = self.vector(&a[0])?;
                let w = self.app_map()?.apply(&v, self.mach.nint)?;
                Ok(vec![Value::Vec(self.vector(&Value::Vec(w))?)])
            }
            "iterf" => {
                let v = self.vector(&a[0])?;
                let n = self.int(&a[1])?;
                Ok(vec![Value::Vec(self.iterf(&v, n)?)])
            }
            "boundf" => {
                let (lo, hi) = self.boxed(&a[0])?;
                let (qlo, qhi) = self.app_map()?.bound(&lo, &hi, self.mach.nint)?;
                let q = Value::Box { lo: qlo, hi: qhi };
                self.boxed(&q)?;
                Ok(vec![q])
            }
            "typep" => self.prgm(&a[0]).map(|_| vec![]),
            "eqp" => {
                let (p, q) = (self.prgm(&a[0])?, self.prgm(&a[1])?);
                Self::relation(program_equiv(p, q), || "programs are not equivalent".into())
            }
            "eqio" => {
                let (p, q) = (self.prgm(&a[0])?, self.prgm(&a[1])?);
                Self::relation(io_equiv(p, q).is_ok() && io_equiv(q, p).is_ok(), || "programs are not I/O equivalent".into())
            }
            "sub" => {
                let (p, q) = (self.prgm(&a[0])?, self.prgm(&a[1])?);
                Self::relation(is_sublist(p, q), || "not a sublist".into())
            }
            "conc" => {
                let (p, q) = (self.prgm(&a[0])?, self.prgm(&a[1])?);
                let r = p
                    .concat(q, &self.th.consts)
                    .map_err(|e| ExecError { kind: ExecErrorKind::TypeViolation, site: 0, detail: e.to_string() })?;
                Ok(vec![Value::Prgm(r)])
            }
            _ => fail(ExecErrorKind::TypeViolation, format!("`{name}` has no executable semantics")),
        }
    }
}

/// Convenience: evaluate `p` under `th` and `mach` without an application map.
pub fn eval(th: &Theory, p: &Program, input: &Env, mach: MachParams) -> Result<Env, ExecError> {
    Evaluator::new(th, mach).eval(p, input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ConstSet;

    fn int() -> Theory {
        Theory::bundled_axioms("int").unwrap()
    }

    fn env(text: &str) -> Env {
        Env::parse(text, None, &ConstSet::default()).unwrap()
    }

    fn prog(th: &Theory, text: &str) -> Program {
        th.parse_program(text).unwrap()
    }

    #[test]
    fn add_and_overflow() {
        let th = int();
        let m = MachParams::default().with_nint(100);
        let out = eval(&th, &prog(&th, "add [a b] [c]"), &env("a = 40\nb = 2"), m).unwrap();
        assert_eq!(out.get("c"), Some(&Value::Int(42)));
        let e = eval(&th, &prog(&th, "add [a b] [c]"), &env("a = 70\nb = 50"), m).unwrap_err();
        assert_eq!(e.kind, ExecErrorKind::Overflow);
    }

    #[test]
    fn associativity_counterexample() {
        let th = int();
        let m = MachParams::default().with_nint(100);
        let p = th.rule("axi3a").unwrap().premise.clone();
        let e = eval(&th, &p, &env("a = -100\nb = 100\nc = 1"), m).unwrap_err();
        assert_eq!(e.kind, ExecErrorKind::Overflow);
        assert_eq!(e.site, 3);
    }

    #[test]
    fn division() {
        let th = int();
        let m = MachParams::default();
        let p = prog(&th, "div [a b] [c]");
        assert_eq!(eval(&th, &p, &env("a = 12\nb = 4"), m).unwrap().get("c"), Some(&Value::Int(3)));
        assert_eq!(eval(&th, &p, &env("a = 12\nb = 5"), m).unwrap_err().kind, ExecErrorKind::DivisionError);
        assert_eq!(eval(&th, &p, &env("a = 12\nb = 0"), m).unwrap_err().kind, ExecErrorKind::DivisionError);
    }

    #[test]
    fn abs_is_exclusive() {
        let th = int();
        let m = MachParams::default();
        let p = prog(&th, "abs [a] [b]");
        for (a, b) in [(-5, 5), (0, 0), (7, 7)] {
            let out = eval(&th, &p, &env(&format!("a = {a}")), m).unwrap();
            assert_eq!(out.get("b"), Some(&Value::Int(b)));
            assert!(!out.contains("a1"));
        }
        let le = prog(&th, "le [a b] [ ]");
        assert_eq!(eval(&th, &le, &env("a = 3\nb = 2"), m).unwrap_err().kind, ExecErrorKind::RelationFailure);
    }

    #[test]
    fn rationals() {
        let th = Theory::bundled_axioms("rat").unwrap();
        let m = MachParams::default();
        let e = Env::parse("a = 1.5\nb = 0.25", Some(m.scale()), &th.consts).unwrap();
        let out = eval(&th, &prog(&th, "mult [a b] [c]\ndiv [1 b] [d]"), &e, m).unwrap();
        assert_eq!(out.get("c").unwrap().render(m.scale()), "0.375");
        assert_eq!(out.get("d"), Some(&Value::Rat(4000)));
        let tiny = Env::parse("a = 0.001\nb = 0.001", Some(m.scale()), &th.consts).unwrap();
        assert_eq!(eval(&th, &prog(&th, "mult [a b] [c]"), &tiny, m).unwrap_err().kind, ExecErrorKind::Overflow);
    }

    #[test]
    fn vectors_and_boxes() {
        let th = Theory::bundled_axioms("vec").unwrap();
        let m = MachParams::default();
        let e = env("u = [5 -7]\nv = [2 3]\np = [[0 0] [4 4]]");
        let out = eval(&th, &prog(&th, "smult [-1 u] [w]\naddv [w u] [z]\nzvec [u] [o]\neqv [z o] [ ]"), &e, m).unwrap();
        assert_eq!(out.get("w"), Some(&Value::Vec(vec![-5, 7])));
        assert!(eval(&th, &prog(&th, "eltbx [v p] [ ]"), &e, m).is_ok());
        assert_eq!(
            eval(&th, &prog(&th, "eltbx [u p] [ ]"), &e, m).unwrap_err().kind,
            ExecErrorKind::RelationFailure
        );
        let e2 = env("u = [1 2 3]\nv = [2 3]");
        assert_eq!(eval(&th, &prog(&th, "addv [u v] [w]"), &e2, m).unwrap_err().kind, ExecErrorKind::DimMismatch);
    }

    #[test]
    fn iteration() {
        let th = Theory::bundled_axioms("vec").unwrap();
        let m = MachParams::default().with_nint(100);
        let f = ArithMap::scaling(1, 2);
        let mut ev = Evaluator::new(&th, m).with_map(&f);
        assert_eq!(ev.iterf(&[3], 0).unwrap(), vec![3]);
        assert_eq!(ev.iterf(&[1], 6).unwrap(), vec![64]);
        let e = ev.iterf(&[1], 7).unwrap_err();
        assert_eq!(e.kind, ExecErrorKind::Overflow);
        assert!(e.detail.starts_with("step 7"));
        assert_eq!(ev.iterf(&[1], -1).unwrap_err().kind, ExecErrorKind::RelationFailure);
        let small = MachParams { tcpu: 5, ..m };
        let e = Evaluator::new(&th, small).with_map(&f).iterf(&[0], 10).unwrap_err();
        assert_eq!(e.kind, ExecErrorKind::DeadlineExceeded);
    }

    #[test]
    fn meta_programs() {
        let th = Theory::bundled_axioms("meta").unwrap();
        let m = MachParams::default();
        let e = Env::parse("p = {add [a b] [c]}\nq = {mult [c a] [d]}", None, &th.consts).unwrap();
        let out = eval(&th, &prog(&th, "conc [p q] [r]\nsub [p r] [ ]"), &e, m).unwrap();
        assert!(matches!(out.get("r"), Some(Value::Prgm(r)) if r.len() == 2));
    }
}
