use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::FoundryError;
use crate::kernel::{dependents_of, reduce_theorem};
use crate::model::{Program, Statement, Token};
use crate::theory::{Conclusion, RuleKind, RuleRecord, RuleStore};

/// Removes `label` and every theorem whose proof depends on it. Returns the
/// removed labels, `label` first.
pub fn purge(label: &str, store: &mut RuleStore) -> Result<Vec<String>, FoundryError> {
    if !store.contains(label) {
        return Err(FoundryError::UnknownLabel(label.to_string()));
    }
    let mut removed = vec![label.to_string()];
    removed.extend(dependents_of(label, store));
    for l in &removed {
        store.remove(l);
    }
    let remaining: Vec<String> = store.theorems().map(|r| r.label.clone()).collect();
    for t in remaining {
        reduce_theorem(&t, store).map_err(|e| FoundryError::Invalid(e.to_string()))?;
    }
    Ok(removed)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    /// `(axiom, theorem)`: the axiom was relabeled a theorem with the theorem's proof.
    pub relabeled: Vec<(String, String)>,
    /// Equivalent axiom pairs, left for an operator to merge.
    pub duplicate_axioms: Vec<(String, String)>,
}

impl SweepReport {
    pub fn modified(&self) -> bool {
        !self.relabeled.is_empty()
    }
}

/// Relabels every axiom equivalent to a stored theorem whose proof does not rely on it.
pub fn relabel_sweep(store: &mut RuleStore) -> SweepReport {
    let mut report = SweepReport::default();
    let axioms: Vec<RuleRecord> = store.axioms().cloned().collect();
    let theorems: Vec<RuleRecord> = store.theorems().cloned().collect();
    for (i, a) in axioms.iter().enumerate() {
        for b in &axioms[i + 1..] {
            if rules_equivalent(a, b) {
                report.duplicate_axioms.push((a.label.clone(), b.label.clone()));
            }
        }
    }
    for a in &axioms {
        let Some(t) = theorems
            .iter()
            .find(|t| rules_equivalent(a, t) && !dependents_of(&a.label, store).contains(&t.label))
        else {
            continue;
        };
        if store.relabel(&a.label, RuleKind::Theorem, t.tcl.clone()).is_ok() {
            report.relabeled.push((a.label.clone(), t.label.clone()));
        }
    }
    report
}

/// Equality up to a bijective renaming of variables and reordering of the
/// premise and conclusion statements.
pub fn rules_equivalent(a: &RuleRecord, b: &RuleRecord) -> bool {
    let (ca, cb) = match (&a.conclusion, &b.conclusion) {
        (Conclusion::False, Conclusion::False) => (Program::new(), Program::new()),
        (Conclusion::Program(x), Conclusion::Program(y)) => (x.clone(), y.clone()),
        _ => return false,
    };
    if a.premise.len() != b.premise.len() || ca.len() != cb.len() {
        return false;
    }
    let mut m = Renaming::default();
    m.match_perm(&a.premise.stmts, &b.premise.stmts, &mut vec![false; b.premise.len()], &mut |m| {
        m.clone().match_perm(&ca.stmts, &cb.stmts, &mut vec![false; cb.len()], &mut |_| true)
    })
}

#[derive(Debug, Clone, Default)]
struct Renaming {
    fwd: HashMap<String, String>,
    back: HashMap<String, String>,
}

impl Renaming {
    fn bind(&mut self, x: &str, y: &str) -> bool {
        match (self.fwd.get(x), self.back.get(y)) {
            (Some(v), _) => v == y,
            (None, Some(_)) => false,
            (None, None) => {
                self.fwd.insert(x.to_string(), y.to_string());
                self.back.insert(y.to_string(), x.to_string());
                true
            }
        }
    }

    fn stmt(&mut self, x: &Statement, y: &Statement) -> bool {
        if x.name != y.name || x.inputs.len() != y.inputs.len() || x.outputs.len() != y.outputs.len() {
            return false;
        }
        let inputs = x.inputs.iter().zip(&y.inputs).all(|(s, t)| match (s, t) {
            (Token::Var(s), Token::Var(t)) => self.bind(s, t),
            (s, t) => s == t,
        });
        inputs && x.outputs.iter().zip(&y.outputs).all(|(s, t)| self.bind(s, t))
    }

    fn match_perm(
        &mut self,
        xs: &[Statement],
        ys: &[Statement],
        used: &mut Vec<bool>,
        done: &mut dyn FnMut(&Renaming) -> bool,
    ) -> bool {
        let Some((x, rest)) = xs.split_first() else {
            return done(self);
        };
        for j in 0..ys.len() {
            if used[j] {
                continue;
            }
            let mut next = self.clone();
            if next.stmt(x, &ys[j]) {
                used[j] = true;
                let ok = next.match_perm(rest, ys, used, done);
                used[j] = false;
                if ok {
                    return true;
                }
            }
        }
        false
    }
}
