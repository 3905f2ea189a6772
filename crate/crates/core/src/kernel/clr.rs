//! Connection list reduction and theorem connection list reduction.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::lists::{setminus, unique};
use crate::theory::{is_automated, RuleStore};

/// Outcome of connection list reduction over a proof with `n` premise lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    /// Premise labels the conclusion depends on.
    pub support: Vec<usize>,
    /// Unused premises and derived lines, ascending.
    pub redundant: Vec<usize>,
}

impl Reduction {
    pub fn redundant_premises(&self, n: usize) -> Vec<usize> {
        self.redundant.iter().copied().filter(|&l| l <= n).collect()
    }

    pub fn redundant_lines(&self, n: usize) -> Vec<usize> {
        self.redundant.iter().copied().filter(|&l| l > n).collect()
    }
}

/// Connection list reduction. `cl[k]` is the connection list of line `k + 1`
/// (empty for premises); `n` is the number of premise lines.
///
/// The support set `b` starts at the final line's list. Walking the derived
/// lines downwards, a line found in `b` is replaced by its own list and a line
/// absent from `b` is recorded as redundant.
pub fn reduce(n: usize, cl: &[Vec<usize>]) -> Reduction {
    let total = cl.len();
    if total == 0 {
        return Reduction { support: vec![], redundant: vec![] };
    }
    let mut b: Vec<usize> = unique(&cl[total - 1]);
    let mut r: Vec<usize> = (1..=n.min(total)).collect();
    for line in (n + 1..total).rev() {
        if b.contains(&line) {
            let mut next = setminus(&b, &[line]);
            next.extend(cl[line - 1].iter().copied());
            b = unique(&next);
        } else {
            r.push(line);
        }
    }
    let mut redundant = setminus(&r, &b);
    redundant.sort_unstable();
    let mut support = b;
    support.sort_unstable();
    Reduction { support, redundant }
}

/// The pseudocode as printed: a line is kept when its connection list meets
/// `b`, and every derived entry of `b` is expanded at once. Kept for comparison;
/// it misclassifies lines whose list does not meet `b` even though `b` holds them.
pub fn reduce_literal(n: usize, cl: &[Vec<usize>]) -> Reduction {
    let total = cl.len();
    if total == 0 {
        return Reduction { support: vec![], redundant: vec![] };
    }
    let mut b: Vec<usize> = unique(&cl[total - 1]);
    let mut r: Vec<usize> = (1..=n.min(total)).collect();
    for i in (n + 1..total).rev() {
        if b.iter().all(|x| !cl[i - 1].contains(x)) {
            r.push(i);
        } else {
            let mut c = Vec::new();
            for &bj in b.clone().iter() {
                if bj > n {
                    c.extend(cl[bj - 1].iter().copied());
                    b = setminus(&b, &[bj]);
                }
            }
            b.extend(c);
            b = unique(&b);
        }
    }
    let mut redundant = setminus(&r, &b);
    redundant.sort_unstable();
    let mut support = b;
    support.sort_unstable();
    Reduction { support, redundant }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TclError {
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("`{label}` cites `{missing}`, which is not in the store")]
    Dangling { label: String, missing: String },
    #[error("theorem connection lists form a cycle through `{0}`")]
    Cycle(String),
}

/// Replaces theorem labels by their connection lists until only axioms and
/// automated-rule markers remain.
pub fn reduce_theorem(label: &str, store: &RuleStore) -> Result<Vec<String>, TclError> {
    let rule = store.get(label).ok_or_else(|| TclError::UnknownLabel(label.to_string()))?;
    if rule.is_axiom() {
        return Ok(vec![label.to_string()]);
    }
    let mut out = Vec::new();
    let mut stack = Vec::new();
    let mut done = HashSet::new();
    expand(label, store, &mut stack, &mut done, &mut out)?;
    Ok(out)
}

fn expand(
    label: &str,
    store: &RuleStore,
    stack: &mut Vec<String>,
    done: &mut HashSet<String>,
    out: &mut Vec<String>,
) -> Result<(), TclError> {
    if stack.iter().any(|s| s == label) {
        return Err(TclError::Cycle(label.to_string()));
    }
    stack.push(label.to_string());
    let rule = store.get(label).ok_or_else(|| TclError::UnknownLabel(label.to_string()))?;
    for t in &rule.tcl {
        if is_automated(t) {
            if !out.contains(t) {
                out.push(t.clone());
            }
            continue;
        }
        let Some(r) = store.get(t) else {
            return Err(TclError::Dangling { label: label.to_string(), missing: t.clone() });
        };
        if r.is_axiom() {
            if !out.contains(t) {
                out.push(t.clone());
            }
        } else if !done.contains(t) {
            expand(t, store, stack, done, out)?;
        }
    }
    stack.pop();
    done.insert(label.to_string());
    Ok(())
}

/// Theorems whose reduction contains `label`, in store order.
pub fn dependents_of(label: &str, store: &RuleStore) -> Vec<String> {
    let mut out = Vec::new();
    for r in store.theorems() {
        if r.label == label {
            continue;
        }
        if closure(&r.label, store).contains(label) {
            out.push(r.label.clone());
        }
    }
    out
}

/// Every label reachable through theorem connection lists, theorems included.
fn closure(label: &str, store: &RuleStore) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut todo = vec![label.to_string()];
    while let Some(l) = todo.pop() {
        if let Some(r) = store.get(&l) {
            for t in &r.tcl {
                if seen.insert(t.clone()) {
                    todo.push(t.clone());
                }
            }
        }
    }
    seen
}
