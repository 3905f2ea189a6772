//! Batch verification shared by `check`, `extract` and `POST /check`.

use std::collections::HashMap;

use pecr::kernel::{check_proof, citation_order, extract, BatchError, LineVerdict, ProofScript};
use pecr::{RuleRecord, Theory};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofVerdict {
    pub label: String,
    /// The first failing line and its fault, when verification failed.
    pub error: Option<String>,
    pub lines: Vec<LineVerdict>,
    /// Redundant line labels (1-based).
    pub redundant: Vec<usize>,
    pub theorem: Option<RuleRecord>,
}

impl ProofVerdict {
    pub fn verified(&self) -> bool {
        self.error.is_none() && self.redundant.is_empty()
    }
}

/// Verifies `scripts` against `th`. Stored rules carrying a script's label
/// are set aside first so each script is re-derived; scripts whose
/// citations are satisfied are checked in parallel, level by level.
/// Verdicts come back in input order.
pub fn verify(th: &Theory, scripts: &[ProofScript]) -> Result<Vec<ProofVerdict>, BatchError> {
    let order = citation_order(scripts)?;
    let mut th = th.clone();
    for s in scripts {
        th.store.remove(&s.label);
    }
    let index: HashMap<&str, usize> = scripts.iter().enumerate().map(|(k, s)| (s.label.as_str(), k)).collect();
    let mut level = vec![0usize; scripts.len()];
    for &k in &order {
        level[k] = scripts[k]
            .cited_labels()
            .iter()
            .filter_map(|l| index.get(l.as_str()))
            .map(|&d| level[d] + 1)
            .max()
            .unwrap_or(0);
    }
    let depth = level.iter().max().map_or(0, |m| m + 1);
    let mut out: Vec<Option<ProofVerdict>> = vec![None; scripts.len()];
    for lv in 0..depth {
        let batch: Vec<usize> = order.iter().copied().filter(|&k| level[k] == lv).collect();
        let verdicts: Vec<ProofVerdict> = std::thread::scope(|scope| {
            let th = &th;
            let handles: Vec<_> = batch.iter().map(|&k| scope.spawn(move || verdict(th, &scripts[k]))).collect();
            handles.into_iter().map(|h| h.join().expect("verification thread panicked")).collect()
        });
        for (k, v) in batch.into_iter().zip(verdicts) {
            if let Some(rec) = v.theorem.clone().filter(|_| v.verified()) {
                th.store_rule(rec)?;
            }
            out[k] = Some(v);
        }
    }
    Ok(out.into_iter().map(|v| v.expect("every script has a level")).collect())
}

fn verdict(th: &Theory, script: &ProofScript) -> ProofVerdict {
    let mut v = ProofVerdict { label: script.label.clone(), error: None, lines: vec![], redundant: vec![], theorem: None };
    match check_proof(th, script) {
        Err(e) => v.error = Some(e.to_string()),
        Ok(report) => {
            v.redundant = report.reduction.redundant.clone();
            v.lines = report.lines.clone();
            if !report.is_irredundant() {
                return v;
            }
            match extract(script, &report) {
                Ok(rec) => v.theorem = Some(rec),
                Err(e) => v.error = Some(e.to_string()),
            }
        }
    }
    v
}
