use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::clr::{reduce, Reduction};
use super::script::{Justification, ProofScript, ScriptLine};
use crate::engine::{check_contraction, used_names, Derived, Deriver, Line, Pick};
use crate::model::{Statement, Token};
use crate::theory::{is_automated, Conclusion, RuleRecord, Theory, TheoryError};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum LineFault {
    #[error("premise line does not match premise statement {0}")]
    PremiseMismatch(usize),
    #[error("derived line has no justification")]
    MissingJustification,
    #[error("premise line carries a justification")]
    JustifiedPremise,
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("bad connection list: {0}")]
    BadConnectionList(String),
    #[error("`{0}` does not derive this line from the cited lines")]
    NoDerivation(String),
    #[error("output `{0}` is not fresh")]
    OutputNotFresh(String),
    #[error("no starred disjunction line contracts to this line with `{0}` and `{1}`")]
    NoContraction(String, String),
    #[error("final line does not equal the stated conclusion")]
    ConclusionMismatch,
    #[error("not a proof: final input `{0}` is neither a premise I/O name nor a constant")]
    NotAProof(String),
    #[error("the proof has fewer lines than premises")]
    TooShort,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{label} line {line}: {fault}")]
pub struct CheckError {
    pub label: String,
    pub line: usize,
    pub fault: LineFault,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineVerdict {
    pub number: usize,
    /// Justification label, `premise` for premise lines.
    pub label: String,
    /// Connection list (1-based); for a contraction, the internal list.
    pub cl: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub label: String,
    pub premises: usize,
    pub lines: Vec<LineVerdict>,
    pub reduction: Reduction,
    /// Rule labels cited, first use order.
    pub tcl: Vec<String>,
}

impl Report {
    pub fn is_irredundant(&self) -> bool {
        self.reduction.redundant.is_empty()
    }

    pub fn connection_lists(&self) -> Vec<Vec<usize>> {
        self.lines.iter().map(|l| l.cl.clone()).collect()
    }
}

fn fault(script: &ProofScript, line: usize, fault: LineFault) -> CheckError {
    CheckError { label: script.label.clone(), line, fault }
}

fn check_refs(refs: &[usize], number: usize) -> Result<Vec<usize>, LineFault> {
    for &r in refs {
        if r == 0 || r >= number {
            return Err(LineFault::BadConnectionList(format!("entry {r} is not an earlier line")));
        }
    }
    Ok(refs.iter().map(|r| r - 1).collect())
}

/// Verifies one derived line against the lines before it; returns its connection list.
pub fn check_line(th: &Theory, prior: &[ScriptLine], line: &ScriptLine) -> Result<Vec<usize>, LineFault> {
    let lines: Vec<Line> = prior.iter().map(|l| l.stmt.clone()).collect();
    let just = line.just.as_ref().ok_or(LineFault::MissingJustification)?;
    let target = match &line.stmt {
        Some(s) => Derived::Stmt(s.clone()),
        None => Derived::False,
    };
    if let Some(s) = &line.stmt {
        let used = used_names(th, &lines);
        if let Some(o) = s.outputs.iter().find(|o| used.contains(*o)) {
            return Err(LineFault::OutputNotFresh(o.clone()));
        }
    }
    match just {
        Justification::Cite { label, refs } => {
            if !is_automated(label) && th.store.get(label).is_none() {
                return Err(LineFault::UnknownLabel(label.clone()));
            }
            let idx = check_refs(refs, line.number)?;
            if let Some(rule) = th.store.get(label) {
                if rule.premise.len() != refs.len() {
                    return Err(LineFault::BadConnectionList(format!(
                        "`{label}` has {} premise statements, {} lines cited",
                        rule.premise.len(),
                        refs.len()
                    )));
                }
            }
            let d = Deriver::with_reserved(th, &lines, &[]);
            d.derives(label, Pick::Fixed(&idx), &target).ok_or_else(|| LineFault::NoDerivation(label.clone()))?;
            Ok(refs.clone())
        }
        Justification::Disj { left, right } => {
            for l in [left, right] {
                if !is_automated(l) && th.store.get(l).is_none() {
                    return Err(LineFault::UnknownLabel(l.clone()));
                }
            }
            let starred: Vec<usize> = prior.iter().enumerate().filter(|(_, l)| l.star).map(|(k, _)| k).collect();
            let c = check_contraction(th, &lines, &starred, left, right, &target)
                .ok_or_else(|| LineFault::NoContraction(left.clone(), right.clone()))?;
            Ok(c.refs.iter().map(|r| r + 1).collect())
        }
    }
}

/// Checks every line of a proof script against `th`.
pub fn check_proof(th: &Theory, script: &ProofScript) -> Result<Report, CheckError> {
    let n = script.premise.len();
    if script.lines.len() < n.max(1) {
        return Err(fault(script, script.lines.len(), LineFault::TooShort));
    }
    let mut verdicts = Vec::new();
    for (k, line) in script.lines.iter().enumerate() {
        if k < n {
            if line.just.is_some() {
                return Err(fault(script, line.number, LineFault::JustifiedPremise));
            }
            if line.stmt.as_ref() != Some(&script.premise.stmts[k]) {
                return Err(fault(script, line.number, LineFault::PremiseMismatch(k + 1)));
            }
            verdicts.push(LineVerdict { number: line.number, label: "premise".into(), cl: vec![] });
            continue;
        }
        let cl = check_line(th, &script.lines[..k], line).map_err(|f| fault(script, line.number, f))?;
        let label = line.just.as_ref().map(|j| j.to_string()).unwrap_or_default();
        verdicts.push(LineVerdict { number: line.number, label, cl });
    }
    let last = script.lines.last().expect("non-empty");
    let expected: Line = match &script.conclusion {
        Conclusion::False => None,
        Conclusion::Program(p) if p.len() == 1 => Some(p.stmts[0].clone()),
        Conclusion::Program(_) => return Err(fault(script, last.number, LineFault::ConclusionMismatch)),
    };
    if last.stmt != expected || (n == script.lines.len() && n > 0) {
        return Err(fault(script, last.number, LineFault::ConclusionMismatch));
    }
    if let Some(s) = &last.stmt {
        let names: HashSet<String> = script.premise.io_names().into_iter().collect();
        for t in &s.inputs {
            if let Token::Var(v) = t {
                if !names.contains(v) {
                    return Err(fault(script, last.number, LineFault::NotAProof(v.clone())));
                }
            }
        }
    }
    let cls: Vec<Vec<usize>> = verdicts.iter().map(|v| v.cl.clone()).collect();
    Ok(Report {
        label: script.label.clone(),
        premises: n,
        lines: verdicts,
        reduction: reduce(n, &cls),
        tcl: script.cited_labels(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("{label}: redundant lines {redundant:?}")]
    Redundant { label: String, redundant: Vec<usize> },
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// The theorem `[premise conclusion]` of a verified, irredundant proof.
pub fn extract(script: &ProofScript, report: &Report) -> Result<RuleRecord, ExtractError> {
    if !report.is_irredundant() {
        return Err(ExtractError::Redundant { label: script.label.clone(), redundant: report.reduction.redundant.clone() });
    }
    let conclusion = match &script.lines.last().and_then(|l| l.stmt.clone()) {
        Some(s) => Conclusion::Program(vec![s.clone()].into()),
        None => Conclusion::False,
    };
    Ok(RuleRecord {
        label: script.label.clone(),
        kind: script.kind,
        premise: script.premise.clone(),
        conclusion,
        tcl: report.tcl.clone(),
    })
}

/// Removes the given lines and renumbers the rest; returns the script and the old-to-new map.
pub fn prune(script: &ProofScript, remove: &[usize]) -> (ProofScript, HashMap<usize, usize>) {
    let mut map = HashMap::new();
    let mut lines = Vec::new();
    let mut premise = Vec::new();
    let n = script.premise.len();
    for l in &script.lines {
        if remove.contains(&l.number) {
            continue;
        }
        map.insert(l.number, lines.len() + 1);
        if l.number <= n {
            premise.push(script.premise.stmts[l.number - 1].clone());
        }
        lines.push(l.clone());
    }
    for l in &mut lines {
        l.number = map[&l.number];
        if let Some(Justification::Cite { refs, .. }) = &mut l.just {
            for r in refs.iter_mut() {
                *r = map.get(r).copied().unwrap_or(*r);
            }
        }
    }
    let out = ProofScript { premise: premise.into(), lines, ..script.clone() };
    (out, map)
}

/// Adds `stmt` as a new last premise line, shifting the derived lines down by one.
pub fn inject_premise(script: &ProofScript, stmt: Statement) -> ProofScript {
    let n = script.premise.len();
    let mut premise = script.premise.clone();
    premise.stmts.push(stmt.clone());
    let shift = |r: usize| if r > n { r + 1 } else { r };
    let mut lines = Vec::new();
    for l in &script.lines {
        let mut l = l.clone();
        if l.number > n {
            l.number += 1;
        }
        if let Some(Justification::Cite { refs, .. }) = &mut l.just {
            for r in refs.iter_mut() {
                *r = shift(*r);
            }
        }
        lines.push(l);
    }
    lines.insert(n, ScriptLine { number: n + 1, stmt: Some(stmt), star: false, just: None });
    ProofScript { premise, lines, ..script.clone() }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BatchError {
    #[error("citation cycle among {0:?}")]
    Cycle(Vec<String>),
    #[error("duplicate proof label `{0}`")]
    Duplicate(String),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Store(#[from] TheoryError),
}

/// Orders scripts so that each comes after the scripts it cites; ties keep input order.
pub fn citation_order(scripts: &[ProofScript]) -> Result<Vec<usize>, BatchError> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (k, s) in scripts.iter().enumerate() {
        if index.insert(&s.label, k).is_some() {
            return Err(BatchError::Duplicate(s.label.clone()));
        }
    }
    let deps: Vec<Vec<usize>> = scripts
        .iter()
        .map(|s| s.cited_labels().iter().filter_map(|l| index.get(l.as_str()).copied()).collect())
        .collect();
    let mut done = vec![false; scripts.len()];
    let mut order = Vec::new();
    while order.len() < scripts.len() {
        let next = (0..scripts.len()).find(|&k| !done[k] && deps[k].iter().all(|&d| done[d]));
        match next {
            Some(k) => {
                done[k] = true;
                order.push(k);
            }
            None => {
                let rest = (0..scripts.len()).filter(|&k| !done[k]).map(|k| scripts[k].label.clone()).collect();
                return Err(BatchError::Cycle(rest));
            }
        }
    }
    Ok(order)
}

/// Outcome of checking one script in a batch.
#[derive(Debug, Clone)]
pub struct BatchItem {
    pub label: String,
    pub result: Result<Report, CheckError>,
}

/// Checks scripts in citation order, storing each extracted theorem before its dependents.
pub fn check_batch(th: &mut Theory, scripts: &[ProofScript]) -> Result<Vec<BatchItem>, BatchError> {
    let order = citation_order(scripts)?;
    let mut out = Vec::new();
    for k in order {
        let s = &scripts[k];
        let result = check_proof(th, s);
        if let Ok(report) = &result {
            if report.is_irredundant() && th.store.get(&s.label).is_none() {
                let rec = extract(s, report)?;
                th.store_rule(rec)?;
            }
        }
        out.push(BatchItem { label: s.label.clone(), result });
    }
    Ok(out)
}
