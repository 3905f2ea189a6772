use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::sample::SoundnessTest;
use super::FoundryError;
use crate::engine::{fresh_name, options, Derived, Line};
use crate::mach::MachParams;
use crate::model::{Program, Statement, Token};
use crate::theory::{Conclusion, RuleKind, RuleRecord, Theory};

/// Desk-scale limits on the search space.
pub const MAX_ATOMS: usize = 5;
pub const MAX_PREMISE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub atoms: Vec<String>,
    pub max_premise: usize,
    /// Constants allowed as inputs besides variables.
    pub consts: Vec<Token>,
    pub samples: usize,
    pub seed: u64,
    /// Upper bound on enumerated candidates before sampling starts.
    pub max_candidates: usize,
}

impl SearchConfig {
    pub fn new(atoms: &[&str], max_premise: usize) -> Self {
        SearchConfig {
            atoms: atoms.iter().map(|a| a.to_string()).collect(),
            max_premise,
            consts: Vec::new(),
            samples: 200,
            seed: 0,
            max_candidates: 200_000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    /// Distinct candidates up to renaming and premise order.
    pub enumerated: usize,
    /// Candidates passing the structural filters.
    pub structural: usize,
    /// Candidates without a sampled violation and with a computable premise.
    pub sound: usize,
    /// Sound candidates dropped because a shorter premise suffices.
    pub reducible: usize,
    /// Sound, irreducible candidates derivable in at most two steps.
    pub derivable: usize,
    /// The survivors.
    pub candidates: Vec<RuleRecord>,
}

/// Enumerates `[p c]` over `cfg.atoms` with `|p| <= cfg.max_premise` and a
/// single conclusion statement, and keeps the sound, irreducible candidates
/// that the rules of `th` do not already derive within two steps.
pub fn search_axioms(th: &Theory, cfg: &SearchConfig, mach: MachParams) -> Result<SearchReport, FoundryError> {
    if cfg.atoms.len() > MAX_ATOMS {
        return Err(FoundryError::CapExceeded(format!("{} atoms (cap {MAX_ATOMS})", cfg.atoms.len())));
    }
    if cfg.max_premise > MAX_PREMISE.min(mach.nprem) {
        return Err(FoundryError::CapExceeded(format!("premise length {} (cap {})", cfg.max_premise, MAX_PREMISE.min(mach.nprem))));
    }
    let mut sigs = Vec::new();
    for a in &cfg.atoms {
        let sig = th.atoms.get(a).ok_or_else(|| FoundryError::Invalid(format!("unknown atom `{a}`")))?;
        sigs.push((a.clone(), sig.inputs.clone(), sig.outputs.len()));
    }
    let mut en = Enumerator { th, sigs: &sigs, consts: &cfg.consts, cap: cfg.max_candidates, seen: HashSet::new(), found: Vec::new() };
    en.premises(&mut Vec::new(), cfg.max_premise)?;
    let mut report = SearchReport { enumerated: en.found.len(), ..Default::default() };

    let structural: Vec<RuleRecord> = en.found.into_iter().filter(structurally_admissible).collect();
    report.structural = structural.len();

    let tester = SoundnessTest::new(th, mach);
    let mut sound: Vec<RuleRecord> = Vec::new();
    for r in structural {
        let v = tester.run(&r, cfg.samples, cfg.seed)?;
        if !v.is_violation() && v.computable > 0 {
            sound.push(r);
        }
    }
    report.sound = sound.len();

    let keys: HashSet<String> = sound.iter().map(canonical_key).collect();
    let irreducible: Vec<RuleRecord> = sound.into_iter().filter(|r| !has_sound_subpremise(th, r, &keys)).collect();
    report.reducible = report.sound - irreducible.len();

    for (i, mut r) in irreducible.into_iter().enumerate() {
        if derivable_within_two(th, &r) {
            report.derivable += 1;
        } else {
            r.label = format!("cand{}", i + 1);
            report.candidates.push(r);
        }
    }
    Ok(report)
}

struct Enumerator<'a> {
    th: &'a Theory,
    sigs: &'a [(String, Vec<String>, usize)],
    consts: &'a [Token],
    cap: usize,
    seen: HashSet<String>,
    found: Vec<RuleRecord>,
}

impl Enumerator<'_> {
    fn premises(&mut self, prem: &mut Vec<Statement>, left: usize) -> Result<(), FoundryError> {
        if !prem.is_empty() {
            self.conclusions(prem)?;
        }
        if left == 0 {
            return Ok(());
        }
        for s in self.statements(prem, true) {
            prem.push(s);
            self.premises(prem, left - 1)?;
            prem.pop();
        }
        Ok(())
    }

    fn conclusions(&mut self, prem: &[Statement]) -> Result<(), FoundryError> {
        for c in self.statements(prem, false) {
            let rule = RuleRecord {
                label: String::new(),
                kind: RuleKind::Axiom,
                premise: Program { stmts: prem.to_vec() },
                conclusion: Conclusion::Program(Program { stmts: vec![c] }),
                tcl: Vec::new(),
            };
            if self.th.check_rule(&rule).is_err() || !self.seen.insert(canonical_key(&rule)) {
                continue;
            }
            if self.found.len() >= self.cap {
                return Err(FoundryError::CapExceeded(format!("more than {} candidates", self.cap)));
            }
            self.found.push(rule);
        }
        Ok(())
    }

    /// Next statements: inputs from names so far, constants and (in the
    /// premise) one new variable; outputs fresh.
    fn statements(&self, prem: &[Statement], allow_new: bool) -> Vec<Statement> {
        let names = Program { stmts: prem.to_vec() }.io_names();
        let mut out = Vec::new();
        for (name, ins, nout) in self.sigs {
            let mut partial: Vec<(Vec<Token>, usize)> = vec![(Vec::new(), names.len())];
            for _ in ins {
                let mut next = Vec::new();
                for (toks, n) in &partial {
                    let mut choices: Vec<Token> = names.iter().map(|v| Token::var(v)).collect();
                    choices.extend((names.len()..*n).map(|i| Token::var(&fresh_name(i))));
                    choices.extend(self.consts.iter().cloned());
                    for t in choices {
                        let mut toks = toks.clone();
                        toks.push(t);
                        next.push((toks, *n));
                    }
                    if allow_new {
                        let mut toks = toks.clone();
                        toks.push(Token::var(&fresh_name(*n)));
                        next.push((toks, n + 1));
                    }
                }
                partial = next;
            }
            for (inputs, n) in partial {
                let outputs: Vec<String> = (n..n + nout).map(fresh_name).collect();
                out.push(Statement { name: name.clone(), inputs, outputs });
            }
        }
        out
    }
}

/// The conclusion is not already a premise statement, and no premise
/// statement repeats another up to outputs.
fn structurally_admissible(r: &RuleRecord) -> bool {
    let Some(c) = r.conclusion.program() else { return false };
    let p = &r.premise.stmts;
    let repeats = p.iter().enumerate().any(|(i, s)| p[i + 1..].iter().any(|t| s.same_up_to_outputs(t)));
    !repeats && !c.stmts.iter().any(|s| p.iter().any(|t| s.same_up_to_outputs(t)))
}

/// Rendering of `r` minimised over premise orders, with variables renamed
/// by first appearance.
pub fn canonical_key(r: &RuleRecord) -> String {
    let concl: Vec<Statement> = r.conclusion.program().map(|c| c.stmts.clone()).unwrap_or_default();
    let mut best: Option<String> = None;
    permutations(r.premise.len(), &mut |perm| {
        let mut ren: HashMap<String, String> = HashMap::new();
        let mut text = String::new();
        let ordered = perm.iter().map(|&i| &r.premise.stmts[i]).chain(concl.iter());
        for (k, s) in ordered.enumerate() {
            if k == perm.len() {
                text.push_str("| ");
            }
            let mut rename = |v: &str| {
                let n = ren.len();
                ren.entry(v.to_string()).or_insert_with(|| fresh_name(n)).clone()
            };
            let ins: Vec<String> = s.inputs.iter().map(|t| t.as_var().map_or_else(|| t.text(), &mut rename)).collect();
            let outs: Vec<String> = s.outputs.iter().map(|o| rename(o)).collect();
            text.push_str(&format!("{} [{}] [{}] ", s.name, ins.join(" "), outs.join(" ")));
        }
        if r.conclusion.is_false() {
            text.push_str("| :false");
        }
        if best.as_ref().is_none_or(|b| text < *b) {
            best = Some(text);
        }
    });
    best.unwrap_or_default()
}

fn permutations(n: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == used.len() {
            f(cur);
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, f);
                cur.pop();
                used[i] = false;
            }
        }
    }
    go(&mut Vec::new(), &mut vec![false; n], f);
}

fn has_sound_subpremise(th: &Theory, r: &RuleRecord, sound: &HashSet<String>) -> bool {
    (0..r.premise.len()).any(|k| {
        let mut p = r.premise.clone();
        p.stmts.remove(k);
        if p.is_empty() {
            return false;
        }
        let sub = RuleRecord { premise: p, ..r.clone() };
        th.check_rule(&sub).is_ok() && sound.contains(&canonical_key(&sub))
    })
}

/// Whether the conclusion appears among the options after at most two steps.
fn derivable_within_two(th: &Theory, r: &RuleRecord) -> bool {
    let Some(c) = r.conclusion.program() else { return false };
    let target = Derived::Stmt(c.stmts[0].clone());
    let lines: Vec<Line> = r.premise.stmts.iter().cloned().map(Some).collect();
    let first = options(th, &lines, &[]);
    if first.iter().any(|s| s.result.same_shape(&target)) {
        return true;
    }
    let mut tried: HashSet<Derived> = HashSet::new();
    first.iter().any(|s| {
        let Derived::Stmt(st) = &s.result else { return false };
        if !tried.insert(s.result.clone()) {
            return false;
        }
        let mut more = lines.clone();
        more.push(Some(st.clone()));
        options(th, &more, &[]).iter().any(|s| s.result.same_shape(&target))
    })
}
