use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::FoundryError;
use crate::eval::{AppMap, CellularAutomaton, Env, Evaluator, ExecError, Value, EXECUTABLE_ATOMS};
use crate::mach::MachParams;
use crate::model::{Program, Statement};
use crate::theory::{Numeric, RuleRecord, Theory};

/// Redraws allowed per sample while hunting for an environment in which the premise computes.
pub const DEFAULT_RETRIES: usize = 64;

/// The automaton bound to `f` when a rule mentions the map atoms and no map is supplied.
pub const DEFAULT_AUTOMATON: CellularAutomaton = CellularAutomaton { rule: 110, m: 8 };

const MAP_ATOMS: [&str; 3] = ["f", "iterf", "boundf"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Failure {
    /// The conclusion raised an error although the premise computed.
    Exec(ExecError),
    /// The premise of a falsity rule computed.
    FalsePremiseComputes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub env: Env,
    pub failure: Failure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    NoViolation,
    Violation(Counterexample),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoundnessVerdict {
    pub label: String,
    /// Samples drawn (each sample may redraw up to the retry limit).
    pub samples: usize,
    /// Samples whose premise computed.
    pub computable: usize,
    pub outcome: Outcome,
}

impl SoundnessVerdict {
    pub fn is_violation(&self) -> bool {
        matches!(self.outcome, Outcome::Violation(_))
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match &self.outcome {
            Outcome::Violation(c) => Some(c),
            Outcome::NoViolation => None,
        }
    }

    /// One machine-readable line: `label verdict samples computable`.
    pub fn line(&self) -> String {
        let v = if self.is_violation() { "violation" } else { "no-violation" };
        format!("{} {v} {} {}", self.label, self.samples, self.computable)
    }
}

/// Empirical soundness check of stored rules by random evaluation.
pub struct SoundnessTest<'a> {
    th: &'a Theory,
    mach: MachParams,
    map: &'a dyn AppMap,
    dim: Option<usize>,
    retries: usize,
}

impl<'a> SoundnessTest<'a> {
    pub fn new(th: &'a Theory, mach: MachParams) -> Self {
        SoundnessTest { th, mach, map: &DEFAULT_AUTOMATON, dim: Some(DEFAULT_AUTOMATON.m), retries: DEFAULT_RETRIES }
    }

    /// Binds `f`; a cellular automaton also fixes the state dimension.
    pub fn with_map(mut self, map: &'a dyn AppMap, dim: Option<usize>) -> Self {
        self.map = map;
        self.dim = dim;
        self
    }

    pub fn with_retries(mut self, retries: usize) -> Self {
        self.retries = retries.max(1);
        self
    }

    pub fn run(&self, rule: &RuleRecord, samples: usize, seed: u64) -> Result<SoundnessVerdict, FoundryError> {
        let whole = rule.as_program();
        for s in &whole.stmts {
            if !self.executable(&s.name) {
                return Err(FoundryError::NoEvaluatorHook(s.name.clone()));
            }
        }
        let vars = typed_free_vars(self.th, &rule.premise)?;
        let uses_map = whole.stmts.iter().any(|s| MAP_ATOMS.contains(&s.name.as_str()));
        let mut gen = Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            nint: self.mach.nint,
            numeric: self.th.numeric,
            binary_dim: if uses_map { self.dim } else { None },
            ints: Vec::new(),
            vecs: Vec::new(),
            boxes: Vec::new(),
        };
        let mut computable = 0;
        for k in 0..samples {
            for _ in 0..self.retries {
                let env = gen.env(&vars)?;
                let mut ev = Evaluator::new(self.th, self.mach).with_map(self.map);
                if ev.eval(&rule.premise, &env).is_err() {
                    continue;
                }
                computable += 1;
                if let Some(failure) = self.failure(rule, &env) {
                    let outcome = Outcome::Violation(Counterexample { env, failure });
                    return Ok(SoundnessVerdict { label: rule.label.clone(), samples: k + 1, computable, outcome });
                }
                break;
            }
        }
        Ok(SoundnessVerdict { label: rule.label.clone(), samples, computable, outcome: Outcome::NoViolation })
    }

    /// Re-evaluates `rule` on `env`; `None` when the premise fails or the rule holds.
    pub fn replay(&self, rule: &RuleRecord, env: &Env) -> Option<Failure> {
        let mut ev = Evaluator::new(self.th, self.mach).with_map(self.map);
        ev.eval(&rule.premise, env).ok()?;
        self.failure(rule, env)
    }

    fn failure(&self, rule: &RuleRecord, env: &Env) -> Option<Failure> {
        if rule.conclusion.is_false() {
            return Some(Failure::FalsePremiseComputes);
        }
        let mut ev = Evaluator::new(self.th, self.mach).with_map(self.map);
        ev.eval(&rule.as_program(), env).err().map(Failure::Exec)
    }

    fn executable(&self, name: &str) -> bool {
        match self.th.disjunctions.get(name) {
            Some(d) => d.operands.iter().flat_map(|p| &p.stmts).all(|s| self.executable(&s.name)),
            None => EXECUTABLE_ATOMS.contains(&name) && self.th.atoms.contains_key(name),
        }
    }
}

/// `soundness_sample` with the default automaton bound to the map atoms.
pub fn soundness_sample(
    rule: &RuleRecord,
    th: &Theory,
    samples: usize,
    mach: MachParams,
    seed: u64,
) -> Result<SoundnessVerdict, FoundryError> {
    SoundnessTest::new(th, mach).run(rule, samples, seed)
}

/// Free variables of `p` with the type of their first input position.
pub fn typed_free_vars(th: &Theory, p: &Program) -> Result<Vec<(String, String)>, FoundryError> {
    let free = p.free();
    let mut out: Vec<(String, String)> = Vec::new();
    for s in &p.stmts {
        for (pos, t) in s.inputs.iter().enumerate() {
            let Some(v) = t.as_var() else { continue };
            if !free.iter().any(|f| f == v) || out.iter().any(|(n, _)| n == v) {
                continue;
            }
            let ty = input_type(th, s, pos).ok_or_else(|| FoundryError::NoEvaluatorHook(s.name.clone()))?;
            out.push((v.to_string(), ty));
        }
    }
    Ok(out)
}

fn input_type(th: &Theory, s: &Statement, pos: usize) -> Option<String> {
    th.input_types(&s.name)?.get(pos).cloned()
}

/// Mixture sampler. Scalars: uniform over `[-nint, nint]`, small values, or
/// reuse (with a unit perturbation) of values already drawn in the same
/// environment. Vectors share one dimension per environment; a fifth are binary.
/// A fifth of the boxes are the unit box.
struct Generator {
    rng: ChaCha8Rng,
    nint: i64,
    numeric: Numeric,
    binary_dim: Option<usize>,
    ints: Vec<i64>,
    vecs: Vec<Vec<i64>>,
    boxes: Vec<(Vec<i64>, Vec<i64>)>,
}

impl Generator {
    fn env(&mut self, vars: &[(String, String)]) -> Result<Env, FoundryError> {
        self.ints.clear();
        self.vecs.clear();
        self.boxes.clear();
        let dim = match self.binary_dim {
            Some(m) => m,
            None => self.rng.random_range(1..=4),
        };
        let mut env = Env::new();
        for (name, ty) in vars {
            let v = match ty.as_str() {
                "int" => {
                    let x = self.scalar();
                    match self.numeric {
                        Numeric::Rat => Value::Rat(x),
                        _ => Value::Int(x),
                    }
                }
                "vec" => Value::Vec(self.vector(dim)),
                "box" => {
                    let (lo, hi) = self.boxed(dim);
                    Value::Box { lo, hi }
                }
                other => return Err(FoundryError::NoGenerator(other.to_string())),
            };
            env.insert(name, v);
        }
        Ok(env)
    }

    fn scalar(&mut self) -> i64 {
        let roll = self.rng.random_range(0..100);
        let x = if roll < 30 && !self.ints.is_empty() {
            let base = self.ints[self.rng.random_range(0..self.ints.len())];
            (base + self.rng.random_range(-1..=1)).clamp(-self.nint, self.nint)
        } else if roll < 65 {
            self.rng.random_range(-3..=3i64).clamp(-self.nint, self.nint)
        } else {
            self.rng.random_range(-self.nint..=self.nint)
        };
        self.ints.push(x);
        x
    }

    fn vector(&mut self, dim: usize) -> Vec<i64> {
        let roll = self.rng.random_range(0..100);
        let v: Vec<i64> = if self.binary_dim.is_some() || roll < 20 {
            (0..dim).map(|_| self.rng.random_range(0..=1)).collect()
        } else if roll < 40 && !self.vecs.is_empty() {
            self.vecs[self.rng.random_range(0..self.vecs.len())].clone()
        } else {
            let d = if roll < 45 { self.rng.random_range(1..=4) } else { dim };
            let saved = std::mem::take(&mut self.ints);
            let v = (0..d).map(|_| self.scalar()).collect();
            self.ints = saved;
            v
        };
        self.vecs.push(v.clone());
        v
    }

    fn boxed(&mut self, dim: usize) -> (Vec<i64>, Vec<i64>) {
        let roll = self.rng.random_range(0..100);
        let b = if roll < 20 {
            (vec![0; dim], vec![1; dim])
        } else if roll < 40 && !self.boxes.is_empty() {
            self.boxes[self.rng.random_range(0..self.boxes.len())].clone()
        } else if self.binary_dim.is_some() {
            let lo: Vec<i64> = (0..dim).map(|_| self.rng.random_range(0..=1)).collect();
            let hi = lo.iter().map(|&l| if l == 1 { 1 } else { self.rng.random_range(0..=1) }).collect();
            (lo, hi)
        } else {
            let lo = self.vector(dim);
            let hi = lo.iter().map(|&l| (l + self.rng.random_range(0..=3)).min(self.nint)).collect();
            (lo, hi)
        };
        self.boxes.push(b.clone());
        b
    }
}
