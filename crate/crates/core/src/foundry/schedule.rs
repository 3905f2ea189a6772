use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::sample::{Counterexample, SoundnessTest};
use super::search::{search_axioms, SearchConfig};
use super::store::{purge, relabel_sweep};
use super::FoundryError;
use crate::kernel::{check_proof, extract, ProofScript};
use crate::mach::MachParams;
use crate::theory::{RuleRecord, Theory};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Event {
    /// `ds`: a queued proof verified and its theorem was stored.
    Theorem { label: String },
    /// `ds`: a queued proof failed to verify or was redundant.
    ProofRejected { label: String, reason: String },
    /// `fps`: an axiom violated soundness and was purged with its dependents.
    Falsified { axiom: String, removed: Vec<String>, counterexample: Counterexample },
    /// `nps`: a searched candidate was appended as an axiom.
    NewAxiom { label: String },
    /// `mps`: an axiom was found proved and relabeled a theorem.
    Relabeled { axiom: String, theorem: String },
}

impl Event {
    /// Whether the event moves the theory to a new primary state.
    pub fn changes_primary_state(&self) -> bool {
        !matches!(self, Event::Theorem { .. } | Event::ProofRejected { .. })
    }
}

/// Single-process round-robin driver of theorem mining (`ds`), soundness
/// testing (`fps`), axiom search (`nps`) and relabeling (`mps`). Each round
/// gives every action one unit of work, in that order.
pub struct Foundry {
    pub theory: Theory,
    pub mach: MachParams,
    pub samples: usize,
    pub seed: u64,
    pub primary_state: usize,
    proofs: VecDeque<ProofScript>,
    search: Option<SearchConfig>,
    candidates: VecDeque<RuleRecord>,
    tested: HashSet<String>,
    pub log: Vec<Event>,
}

impl Foundry {
    pub fn new(theory: Theory, mach: MachParams, samples: usize, seed: u64) -> Self {
        Foundry {
            theory,
            mach,
            samples,
            seed,
            primary_state: 1,
            proofs: VecDeque::new(),
            search: None,
            candidates: VecDeque::new(),
            tested: HashSet::new(),
            log: Vec::new(),
        }
    }

    /// Queues proofs for `ds`, in the given order.
    pub fn queue_proofs(&mut self, scripts: impl IntoIterator<Item = ProofScript>) {
        self.proofs.extend(scripts);
    }

    /// Enables `nps` with one search at the start of the next round.
    pub fn enable_search(&mut self, cfg: SearchConfig) {
        self.search = Some(cfg);
    }

    pub fn round(&mut self) -> Result<Vec<Event>, FoundryError> {
        let mut events = Vec::new();
        events.extend(self.ds());
        events.extend(self.fps()?);
        events.extend(self.nps()?);
        events.extend(self.mps());
        if events.iter().any(Event::changes_primary_state) {
            self.primary_state += 1;
        }
        self.log.extend(events.iter().cloned());
        Ok(events)
    }

    /// Runs rounds until one produces no event, at most `max_rounds`.
    pub fn run(&mut self, max_rounds: usize) -> Result<usize, FoundryError> {
        for k in 0..max_rounds {
            if self.round()?.is_empty() && self.is_idle() {
                return Ok(k + 1);
            }
        }
        Ok(max_rounds)
    }

    pub fn is_idle(&self) -> bool {
        self.proofs.is_empty()
            && self.candidates.is_empty()
            && self.search.is_none()
            && self.theory.store.axioms().all(|a| self.tested.contains(&a.label))
    }

    fn ds(&mut self) -> Option<Event> {
        let script = self.proofs.pop_front()?;
        let label = script.label.clone();
        let reject = |reason: String| Event::ProofRejected { label: label.clone(), reason };
        let report = match check_proof(&self.theory, &script) {
            Ok(r) => r,
            Err(e) => return Some(reject(e.to_string())),
        };
        let rec = match extract(&script, &report) {
            Ok(r) => r,
            Err(e) => return Some(reject(e.to_string())),
        };
        match self.theory.store_rule(rec) {
            Ok(()) => Some(Event::Theorem { label }),
            Err(e) => Some(reject(e.to_string())),
        }
    }

    fn fps(&mut self) -> Result<Option<Event>, FoundryError> {
        let Some(axiom) = self.theory.store.axioms().find(|a| !self.tested.contains(&a.label)).cloned() else {
            return Ok(None);
        };
        self.tested.insert(axiom.label.clone());
        let verdict = match SoundnessTest::new(&self.theory, self.mach).run(&axiom, self.samples, self.seed) {
            Ok(v) => v,
            Err(FoundryError::NoEvaluatorHook(_)) | Err(FoundryError::NoGenerator(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let Some(cx) = verdict.counterexample().cloned() else {
            return Ok(None);
        };
        let removed = purge(&axiom.label, &mut self.theory.store)?;
        Ok(Some(Event::Falsified { axiom: axiom.label, removed, counterexample: cx }))
    }

    fn nps(&mut self) -> Result<Option<Event>, FoundryError> {
        if let Some(cfg) = self.search.take() {
            let report = search_axioms(&self.theory, &cfg, self.mach)?;
            self.candidates.extend(report.candidates);
        }
        let Some(mut rule) = self.candidates.pop_front() else {
            return Ok(None);
        };
        let mut k = 1;
        while self.theory.store.contains(&format!("axs{k}")) {
            k += 1;
        }
        rule.label = format!("axs{k}");
        self.theory.store_rule(rule.clone()).map_err(|e| FoundryError::Invalid(e.to_string()))?;
        Ok(Some(Event::NewAxiom { label: rule.label }))
    }

    fn mps(&mut self) -> Vec<Event> {
        relabel_sweep(&mut self.theory.store)
            .relabeled
            .into_iter()
            .map(|(axiom, theorem)| Event::Relabeled { axiom, theorem })
            .collect()
    }
}
